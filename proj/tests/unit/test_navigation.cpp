// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include "mapio/error.hpp"
#include "mapio/navigation.hpp"

#include <gtest/gtest.h>

using namespace mapio;
using namespace mapio::nav;
using mapio::fx::fixture;

namespace {

const MapModel& midtown()
{
    static const MapModel m = load_map_file(fixture("midtown.json"));
    return m;
}

const pointer::FeatureHit kNoHit{};

std::vector<NavEventType> types(const std::vector<NavEvent>& events)
{
    std::vector<NavEventType> out;
    for (const auto& e : events)
        out.push_back(e.type);
    return out;
}

} // namespace

TEST(StreetNav, StartReturnsFirstInstructionOnly)
{
    const auto s = start_street_nav({200, 340}, spatial::PoiRef{"p-esb"}, midtown());
    ASSERT_TRUE(s.first);
    EXPECT_EQ(s.first->text, "Head east on West 38th Street for 1 block (200 m)");
    EXPECT_EQ(s.session.instructions.size(), 3u);
    EXPECT_EQ(s.session.target_name, "Empire State Building");
    EXPECT_EQ(s.session.status, NavStatus::Active);
}

TEST(StreetNav, AlreadyThere)
{
    const auto& esb = midtown().poi("p-esb");
    const auto s = start_street_nav(esb.position, spatial::PoiRef{"p-esb"}, midtown());
    EXPECT_FALSE(s.first);
}

TEST(StreetNav, FollowsRouteToArrival)
{
    auto s = start_street_nav({200, 340}, spatial::PoiRef{"p-esb"}, midtown()).session;
    std::vector<NavEventType> all;
    auto feed = [&](Point2D p) {
        for (auto t : types(update_street_nav(s, p, kNoHit, midtown())))
            all.push_back(t);
    };
    for (double x = 200; x <= 400; x += 5)
        feed({x, 340});
    for (double y = 340; y >= 20; y -= 5)
        feed({400, y});
    for (double x = 400; x >= 370; x -= 2)
        feed({x, 20});
    EXPECT_EQ(all, (std::vector<NavEventType>{NavEventType::StepDone, NavEventType::StepDone, NavEventType::StepDone,
                                               NavEventType::Arrived}));
    EXPECT_EQ(s.status, NavStatus::Arrived);
    EXPECT_TRUE(update_street_nav(s, {0, 0}, kNoHit, midtown()).empty());
}

TEST(StreetNav, NodeHitCompletesStep)
{
    auto s = start_street_nav({200, 340}, spatial::PoiRef{"p-esb"}, midtown()).session;
    const pointer::FeatureHit at_n1{pointer::FeatureKind::Intersection, "n1", {400, 340}, 20.0};
    // 20 m short of the corner but the pointer snapped to it
    const auto events = update_street_nav(s, {380, 340}, at_n1, midtown());
    ASSERT_EQ(events.size(), 1u);
    EXPECT_EQ(events[0].type, NavEventType::StepDone);
    EXPECT_EQ(events[0].step, 0u);
    ASSERT_TRUE(events[0].instruction);
    EXPECT_EQ(events[0].instruction->street_name, "5th Avenue");
}

TEST(StreetNav, WrongDirectionReroutes)
{
    auto s = start_street_nav({200, 340}, spatial::PoiRef{"p-esb"}, midtown()).session;
    EXPECT_TRUE(update_street_nav(s, {180, 340}, kNoHit, midtown()).empty()); // within budget
    const auto events = update_street_nav(s, {150, 340}, kNoHit, midtown());
    EXPECT_EQ(types(events), (std::vector<NavEventType>{NavEventType::WrongDirection, NavEventType::Rerouted}));
    EXPECT_GT(events[0].distance_m, 25.0);
    ASSERT_TRUE(events[1].instruction);
    EXPECT_EQ(s.status, NavStatus::Active);
    EXPECT_EQ(s.step_index, 0u);
    EXPECT_EQ(s.origin, (Point2D{150, 340}));
}

TEST(StreetNav, UnreachableTargetThrows)
{
    auto d = nlohmann::json::parse(fx::read_file(fixture("grid3x3.json")));
    d["nodes"].push_back({{"id", "z1"}, {"position", {10, 10}}});
    d["nodes"].push_back({{"id", "z2"}, {"position", {20, 10}}});
    d["edges"].push_back({{"id", "zz"}, {"endpoints", {"z1", "z2"}}, {"street_name", "Lonely Lane"}});
    const auto m = load_map(d.dump());
    EXPECT_THROW(start_street_nav({150, 150}, spatial::NodeRef{"z1"}, m), Error);
}

TEST(Beacon, CuesAndArrival)
{
    auto s = start_flyme(spatial::PoiRef{"p-solle"}, midtown());
    EXPECT_EQ(s.target, (Point2D{300, 268}));
    auto e = update_flyme(s, {200, 268}, Millis(0));
    ASSERT_TRUE(e);
    EXPECT_EQ(e->type, BeaconEventType::Cue);
    EXPECT_EQ(e->direction, spatial::Cardinal::E);
    EXPECT_EQ(e->text, "Move east, 100 m to go.");
    // same sector inside the minimum interval: silent
    EXPECT_FALSE(update_flyme(s, {210, 268}, Millis(500)));
    // same sector, interval elapsed
    EXPECT_TRUE(update_flyme(s, {220, 268}, Millis(1000)));
    // sector change: immediate
    e = update_flyme(s, {300, 200}, Millis(1100));
    ASSERT_TRUE(e);
    EXPECT_EQ(e->direction, spatial::Cardinal::N);
    e = update_flyme(s, {300, 258}, Millis(1200));
    ASSERT_TRUE(e);
    EXPECT_EQ(e->type, BeaconEventType::Arrived);
    EXPECT_EQ(s.status, BeaconStatus::Arrived);
    EXPECT_FALSE(update_flyme(s, {0, 0}, Millis(5000)));
}

TEST(Beacon, CueNeverPointsAway)
{
    auto s = start_flyme(spatial::PoiRef{"p-solle"}, midtown(), {.arrival_radius_m = 1.0, .cue_min_interval = Millis(0)});
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> ux(0, 500), uy(0, 380);
    for (int i = 0; i < 1000; ++i)
    {
        const Point2D p{ux(rng), uy(rng)};
        const auto e = update_flyme(s, p, Millis(i));
        if (!e || e->type != BeaconEventType::Cue)
            continue;
        const double truth = fx::bearing_deg(s.target.x - p.x, s.target.y - p.y);
        EXPECT_LE(fx::angle_between(spatial::cardinal_bearing(e->direction), truth), 22.5 + 1e-9);
    }
}

TEST(Nav, EndpointNames)
{
    EXPECT_EQ(endpoint_name(spatial::PoiRef{"p-esb"}, midtown()), "Empire State Building");
    EXPECT_EQ(endpoint_name(spatial::NodeRef{"n1"}, midtown()), "the intersection of " + midtown().intersection_name("n1"));
}
