// SPDX-License-Identifier: Apache-2.0
#include "mapio/service.hpp"

#include "mapio/error.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include <atomic>
#include <ctime>
#include <thread>

namespace mapio::service {

using nlohmann::json;

namespace {

/// Wall time of the host, read once per session as its starting clock.
WallTime host_wall_time()
{
    const std::time_t now = std::time(nullptr);
    std::tm local{};
    localtime_r(&now, &local);
    WallTime t;
    t.day = static_cast<Weekday>((local.tm_wday + 6) % 7);
    t.minute = local.tm_hour * 60 + local.tm_min;
    return t;
}

/// The base that makes `wall` the session's wall time at `now`.
WallTime base_for(const WallTime& wall, Millis now)
{
    constexpr long long week = 7LL * kMinutesPerDay;
    long long minutes = static_cast<long long>(wall.day) * kMinutesPerDay + wall.minute - now.count() / 60000;
    minutes = ((minutes % week) + week) % week;
    return {static_cast<Weekday>(minutes / kMinutesPerDay), static_cast<int>(minutes % kMinutesPerDay)};
}

std::string sse_frame(const WireEvent& e)
{
    return fmt::format("id: {}\nevent: {}\ndata: {}\n\n", e.seq, to_string(e.type), e.to_json().dump());
}

json parse_body(const httplib::Request& req)
{
    if (req.body.empty())
        return json::object();
    json doc = json::parse(req.body, nullptr, false);
    if (doc.is_discarded())
        fail(ErrorKind::Validation, "request body is not valid JSON");
    return doc;
}

Point2D point_of(const json& v)
{
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        fail(ErrorKind::Validation, "expected [x, y]");
    Point2D p{v[0].get<double>(), v[1].get<double>()};
    if (!is_finite(p))
        fail(ErrorKind::Validation, "coordinates must be finite");
    return p;
}

std::vector<pointer::HandFrame> hands_from(const json& body, const pointer::GestureConfig& gesture)
{
    std::optional<pointer::Homography> h;
    if (auto it = body.find("homography"); it != body.end())
    {
        if (!it->is_array() || it->size() != 9)
            fail(ErrorKind::Validation, "homography must be 9 numbers, row-major");
        std::array<double, 9> m{};
        for (std::size_t i = 0; i < 9; ++i)
        {
            if (!(*it)[i].is_number())
                fail(ErrorKind::Validation, "homography must be 9 numbers, row-major");
            m[i] = (*it)[i].get<double>();
        }
        h = pointer::Homography::from_matrix(m);
    }
    std::vector<pointer::HandFrame> out;
    const json hands = body.value("hands", json::array());
    if (!hands.is_array())
        fail(ErrorKind::Validation, "hands must be an array");
    for (const auto& hj : hands)
    {
        if (!hj.is_object())
            fail(ErrorKind::Validation, "each hand must be an object");
        pointer::HandFrame f;
        f.hand = pointer::parse_hand(hj.value("hand", std::string("right")));
        Point2D frame_point;
        if (auto lm = hj.find("landmarks"); lm != hj.end())
        {
            if (!lm->is_array())
                fail(ErrorKind::Validation, "landmarks must be an array of [x, y]");
            std::vector<Point2D> pts;
            for (const auto& p : *lm)
                pts.push_back(point_of(p));
            auto landmarks = pts.size() == pointer::kLandmarkCount + 1
                                 ? pointer::HandLandmarks::from_mediapipe(f.hand, pts)
                                 : pointer::HandLandmarks::from_points(f.hand, pts);
            f.pointing = pointer::detect_pointing(landmarks, gesture);
            frame_point = landmarks.index_tip();
        }
        else
        {
            if (!hj.contains("x") || !hj.contains("y") || !hj["x"].is_number() || !hj["y"].is_number())
                fail(ErrorKind::Validation, "a hand needs numeric x and y, or landmarks");
            frame_point = {hj["x"].get<double>(), hj["y"].get<double>()};
            f.pointing = hj.value("pointing", true);
        }
        f.map_position = h ? pointer::to_map_coords(*h, frame_point) : frame_point;
        if (!is_finite(f.map_position))
            fail(ErrorKind::Validation, "hand position must be finite");
        out.push_back(f);
    }
    return out;
}

int status_for(ErrorKind k)
{
    switch (k)
    {
        case ErrorKind::Validation:
        case ErrorKind::Degenerate: return 400;
        case ErrorKind::NotFound: return 404;
        case ErrorKind::Unreachable: return 422;
        case ErrorKind::Backend: return 502;
        case ErrorKind::Runtime: return 500;
    }
    return 500;
}

} // namespace

struct HttpService::Impl
{
    EngineConfig config;
    BackendFactory backends;
    std::shared_ptr<EventBus> bus;

    httplib::Server server;
    std::thread server_thread;
    std::thread pump_thread;
    std::atomic<bool> running{false};

    std::mutex mutex; // guards everything below
    std::shared_ptr<const MapModel> model;
    std::unique_ptr<Session> session;
    std::chrono::steady_clock::time_point epoch = std::chrono::steady_clock::now();
    Millis last_frame{-1}; // pointer frames need strictly increasing times

    Millis now() const
    {
        return std::chrono::duration_cast<Millis>(std::chrono::steady_clock::now() - epoch);
    }

    void open_session(std::shared_ptr<const MapModel> m)
    {
        session.reset();
        last_frame = Millis(-1);
        model = std::move(m);
        session = std::make_unique<Session>(model, config, backends(), *bus, TurnMode::Background);
        session->set_wall_time(base_for(host_wall_time(), now()));
    }

    void reply_error(httplib::Response& res, int status, const std::string& message)
    {
        bus->publish(WireType::Error, {{"message", message}, {"t_ms", now().count()}});
        res.status = status;
        res.set_content(json{{"error", message}}.dump(), "application/json");
    }

    /// Runs a command against the session under the lock; errors become ERROR events.
    void command(const httplib::Request& req, httplib::Response& res,
                 const std::function<void(Session&, const json&, Millis)>& fn)
    {
        std::lock_guard lock(mutex);
        if (!session)
        {
            reply_error(res, 409, "no map loaded");
            return;
        }
        try
        {
            const json body = parse_body(req);
            const Millis t = now();
            fn(*session, body, t);
            res.set_content(json{{"ok", true}, {"seq", bus->last_seq()}}.dump(), "application/json");
        }
        catch (const Error& e)
        {
            reply_error(res, status_for(e.kind()), e.what());
        }
        catch (const std::exception& e)
        {
            reply_error(res, 400, e.what());
        }
    }

    void routes()
    {
        server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
            std::lock_guard lock(mutex);
            res.set_content(json{{"status", "ok"},
                                 {"map_loaded", session != nullptr},
                                 {"turn_pending", session && session->turn_pending()},
                                 {"last_seq", bus->last_seq()}}
                                .dump(),
                            "application/json");
        });
        server.Get("/map", [this](const httplib::Request&, httplib::Response& res) {
            std::lock_guard lock(mutex);
            if (!model)
            {
                res.status = 404;
                res.set_content(json{{"error", "no map loaded"}}.dump(), "application/json");
                return;
            }
            res.set_content(serialize_map_document(*model), "application/json");
        });
        server.Post("/map", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(mutex);
            try
            {
                open_session(std::make_shared<const MapModel>(load_map(std::string_view(req.body))));
                res.set_content(json{{"ok", true},
                                     {"nodes", model->nodes().size()},
                                     {"edges", model->edges().size()},
                                     {"pois", model->pois().size()},
                                     {"warnings", model->warnings()}}
                                    .dump(),
                                "application/json");
            }
            catch (const Error& e)
            {
                reply_error(res, status_for(e.kind()), e.what());
            }
        });
        server.Post("/pointer", [this](const httplib::Request& req, httplib::Response& res) {
            command(req, res, [this](Session& s, const json& body, Millis t) {
                const auto hands = hands_from(body, config.tracker.gesture);
                t = std::max(t, last_frame + Millis(1));
                last_frame = t;
                s.pointer_frame(t, hands);
            });
        });
        server.Post("/talk/press", [this](const httplib::Request& req, httplib::Response& res) {
            command(req, res, [](Session& s, const json&, Millis t) { s.press_talk(t); });
        });
        server.Post("/talk/release", [this](const httplib::Request& req, httplib::Response& res) {
            command(req, res, [](Session& s, const json&, Millis t) { s.release_talk(t); });
        });
        server.Post("/question", [this](const httplib::Request& req, httplib::Response& res) {
            command(req, res, [](Session& s, const json& body, Millis t) {
                if (!body.contains("text") || !body["text"].is_string())
                    fail(ErrorKind::Validation, "question needs a \"text\" string");
                if (body.contains("wall"))
                {
                    if (!body["wall"].is_string())
                        fail(ErrorKind::Validation, "wall must be a string like \"Monday 22:00\"");
                    s.set_wall_time(base_for(parse_wall_time(body["wall"].get<std::string>()), t));
                }
                s.question(t, body["text"].get<std::string>());
            });
        });
        server.Post("/halt", [this](const httplib::Request& req, httplib::Response& res) {
            command(req, res, [](Session& s, const json&, Millis t) { s.halt(t); });
        });
        server.Post("/pause", [this](const httplib::Request& req, httplib::Response& res) {
            command(req, res, [](Session& s, const json&, Millis t) { s.pause(t); });
        });
        server.Post("/resume", [this](const httplib::Request& req, httplib::Response& res) {
            command(req, res, [](Session& s, const json&, Millis t) { s.resume(t); });
        });
        server.Post("/guidance/stop", [this](const httplib::Request& req, httplib::Response& res) {
            command(req, res, [](Session& s, const json&, Millis t) { s.stop_guidance(t); });
        });
        server.Get("/events/log", [this](const httplib::Request& req, httplib::Response& res) {
            std::uint64_t since = 0;
            if (req.has_param("since"))
            {
                try
                {
                    since = std::stoull(req.get_param_value("since"));
                }
                catch (const std::exception&)
                {
                    res.status = 400;
                    res.set_content(json{{"error", "since must be a sequence number"}}.dump(), "application/json");
                    return;
                }
            }
            res.set_content(to_json_lines(bus->since(since)), "application/x-ndjson");
        });
        server.Get("/events", [this](const httplib::Request& req, httplib::Response& res) {
            auto cursor = std::make_shared<std::uint64_t>(0);
            if (req.has_header("Last-Event-ID"))
                *cursor = std::strtoull(req.get_header_value("Last-Event-ID").c_str(), nullptr, 10);
            else if (req.has_param("since"))
                *cursor = std::strtoull(req.get_param_value("since").c_str(), nullptr, 10);
            res.set_header("Cache-Control", "no-cache");
            res.set_chunked_content_provider("text/event-stream", [this, cursor](std::size_t, httplib::DataSink& sink) {
                if (!running)
                {
                    sink.done();
                    return true;
                }
                std::string chunk;
                for (const auto& e : bus->wait_since(*cursor, std::chrono::milliseconds(250)))
                {
                    chunk += sse_frame(e);
                    *cursor = e.seq;
                }
                if (chunk.empty())
                    chunk = ": keep-alive\n\n";
                return sink.write(chunk.data(), chunk.size());
            });
        });
    }

    void pump()
    {
        while (running)
        {
            {
                std::lock_guard lock(mutex);
                if (session)
                    session->advance(now());
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
    }
};

HttpService::HttpService(EngineConfig config, BackendFactory backends, std::shared_ptr<const MapModel> model):
    _impl(std::make_unique<Impl>()), _bus(std::make_shared<EventBus>())
{
    _impl->config = std::move(config);
    _impl->backends = std::move(backends);
    _impl->bus = _bus;
    if (!_impl->backends)
        fail(ErrorKind::Validation, "service needs a backend factory");
    if (model)
        _impl->open_session(std::move(model));
    _impl->routes();
}

HttpService::~HttpService()
{
    stop();
}

int HttpService::start(const std::string& host, int port)
{
    if (_impl->running)
        fail(ErrorKind::Runtime, "service already started");
    const int bound = port == 0 ? _impl->server.bind_to_any_port(host) : (_impl->server.bind_to_port(host, port) ? port : -1);
    if (bound < 0)
        fail(ErrorKind::Runtime, fmt::format("cannot bind {}:{}", host, port));
    _impl->running = true;
    _impl->server_thread = std::thread([this] { _impl->server.listen_after_bind(); });
    _impl->pump_thread = std::thread([this] { _impl->pump(); });
    _impl->server.wait_until_ready();
    return bound;
}

void HttpService::stop()
{
    if (!_impl)
        return;
    _impl->running = false;
    _impl->server.stop();
    if (_impl->server_thread.joinable())
        _impl->server_thread.join();
    if (_impl->pump_thread.joinable())
        _impl->pump_thread.join();
}

void HttpService::wait()
{
    if (_impl->server_thread.joinable())
        _impl->server_thread.join();
}

} // namespace mapio::service
