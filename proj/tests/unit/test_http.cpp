// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include "mapio/service.hpp"

#include <httplib.h>
#include <gtest/gtest.h>

#include <thread>

using namespace mapio;
using namespace mapio::service;
using json = nlohmann::json;
using mapio::fx::fixture;

namespace {

json quick_script()
{
    return {{"version", 1},
            {"turns",
             {{{"id", "a"},
               {"steps",
                {{{"tool_call", {{"name", "distance"}, {"arguments", {{"from", {{"here", true}}}, {"to", "p-esb"}}}}}},
                 {{"answer", "It is ${0.distance_m} m away."}}}}}}}};
}

class HttpTest : public ::testing::Test
{
protected:
    void SetUp() override
    {
        service = std::make_unique<HttpService>(
            EngineConfig{}, [] { return std::make_shared<prompt::ScriptedBackend>(quick_script()); });
        port = service->start("127.0.0.1", 0);
        client = std::make_unique<httplib::Client>("127.0.0.1", port);
        client->set_read_timeout(5, 0);
    }

    void TearDown() override { service->stop(); }

    httplib::Result post(const std::string& path, const json& body = json::object())
    {
        return client->Post(path, body.dump(), "application/json");
    }

    void load_midtown()
    {
        auto r = client->Post("/map", fx::read_file(fixture("midtown.json")), "application/json");
        ASSERT_TRUE(r);
        ASSERT_EQ(r->status, 200);
    }

    std::vector<json> log(std::uint64_t since = 0)
    {
        auto r = client->Get("/events/log?since=" + std::to_string(since));
        std::vector<json> out;
        if (!r)
            return out;
        std::istringstream in(r->body);
        for (std::string line; std::getline(in, line);)
            if (!line.empty())
                out.push_back(json::parse(line));
        return out;
    }

    bool wait_for(const std::string& type, std::chrono::milliseconds timeout = std::chrono::milliseconds(5000))
    {
        const auto until = std::chrono::steady_clock::now() + timeout;
        while (std::chrono::steady_clock::now() < until)
        {
            for (const auto& e : log())
                if (e["type"] == type)
                    return true;
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
        }
        return false;
    }

    std::unique_ptr<HttpService> service;
    std::unique_ptr<httplib::Client> client;
    int port = 0;
};

} // namespace

TEST_F(HttpTest, HealthAndEphemeralPort)
{
    EXPECT_GT(port, 0);
    auto r = client->Get("/health");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 200);
    EXPECT_EQ(json::parse(r->body)["status"], "ok");
}

TEST_F(HttpTest, CommandsWithoutMapConflict)
{
    auto r = post("/talk/press");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 409);
    const auto events = log();
    ASSERT_FALSE(events.empty());
    EXPECT_EQ(events.back()["type"], "ERROR");
    r = client->Get("/map");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 404);
}

TEST_F(HttpTest, MapUploadValidation)
{
    auto r = client->Post("/map", "{\"version\": 1}", "application/json");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 400);
    load_midtown();
    r = client->Get("/map");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 200);
    EXPECT_EQ(load_map(std::string_view(r->body)).nodes().size(), 18u);
}

TEST_F(HttpTest, PointerFeedbackAndQuestion)
{
    load_midtown();
    // rapid frames on West 38th Street
    for (int i = 0; i < 25; ++i)
    {
        auto r = post("/pointer", {{"hands", {{{"hand", "right"}, {"x", 300}, {"y", 340}}}}});
        ASSERT_TRUE(r);
        ASSERT_EQ(r->status, 200) << r->body;
    }
    bool entered = false;
    for (const auto& e : log())
        if (e["type"] == "ENTER" && e["payload"]["id"] == "e01")
            entered = true;
    EXPECT_TRUE(entered);

    ASSERT_EQ(post("/talk/press")->status, 200);
    auto r = post("/question", {{"text", "How far is the Empire State Building?"}, {"wall", "Monday 14:00"}});
    ASSERT_EQ(r->status, 200) << r->body;
    ASSERT_EQ(post("/talk/release")->status, 200);
    ASSERT_TRUE(wait_for("ANSWER"));
    for (const auto& e : log())
        if (e["type"] == "ANSWER")
            EXPECT_EQ(e["payload"]["text"], "It is 303.2 m away.");
}

TEST_F(HttpTest, BadRequests)
{
    load_midtown();
    auto r = client->Post("/pointer", "not json", "application/json");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 400);
    r = post("/pointer", {{"hands", {{{"hand", "right"}, {"x", "a"}}}}});
    EXPECT_EQ(r->status, 400);
    r = post("/pointer", {{"homography", {1, 2, 3}}, {"hands", json::array()}});
    EXPECT_EQ(r->status, 400);
    r = post("/question", {{"text", 5}});
    EXPECT_EQ(r->status, 400);
    r = client->Get("/events/log?since=abc");
    EXPECT_EQ(r->status, 400);
}

TEST_F(HttpTest, LandmarksThroughHomography)
{
    load_midtown();
    // index straight, others curled; tip at image (400, 390) -> map (155, 340) with H = 0.5x - 45, 0.5y + 145
    json lm = json::array();
    auto add_chain = [&](double x0, bool straight) {
        for (int k = 0; k < 4; ++k)
            lm.push_back(straight ? json{x0, 360 + 10 * k} : json{x0 + (k == 2 ? 6 : k == 3 ? 10 : 0), 360 + (k ? 10 : 0)});
    };
    add_chain(400, true);
    add_chain(420, false);
    add_chain(440, false);
    add_chain(460, false);
    add_chain(480, true);
    for (int i = 0; i < 3; ++i)
    {
        auto r = post("/pointer", {{"homography", {0.5, 0, -45, 0, 0.5, 145, 0, 0, 1}},
                                    {"hands", {{{"hand", "left"}, {"landmarks", lm}}}}});
        ASSERT_EQ(r->status, 200) << r->body;
    }
    bool entered = false;
    for (const auto& e : log())
        if (e["type"] == "ENTER")
            entered = true;
    EXPECT_TRUE(entered);
}

TEST_F(HttpTest, ServerSentEventsResumeFromLastId)
{
    load_midtown();
    post("/pointer", {{"hands", {{{"x", 10}, {"y", 220}}}}}); // nothing within reach: no event
    post("/talk/press");                  // ok
    post("/talk/press");                  // seq 1: ERROR, already pressed
    post("/talk/release");                // ok
    post("/talk/release");                // seq 2: ERROR, not pressed
    post("/talk/press");
    post("/question", {{"text", "hi"}}); // seq 3: ANSWER
    ASSERT_TRUE(wait_for("ANSWER"));

    std::string received;
    httplib::Headers headers = {{"Last-Event-ID", "1"}};
    client->Get("/events", headers, [&](const char* data, std::size_t n) {
        received.append(data, n);
        return received.find("event: ANSWER") == std::string::npos;
    });
    EXPECT_EQ(received.find("id: 1\n"), std::string::npos);
    EXPECT_NE(received.find("id: 2\n"), std::string::npos);
    EXPECT_NE(received.find("event: ERROR"), std::string::npos);
    EXPECT_NE(received.find("data: {"), std::string::npos);
}
