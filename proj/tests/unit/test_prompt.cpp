// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include "mapio/error.hpp"
#include "mapio/prompt.hpp"

#include <gtest/gtest.h>

using namespace mapio;
using namespace mapio::prompt;
using mapio::fx::fixture;

namespace {

const MapModel& midtown()
{
    static const MapModel m = load_map_file(fixture("midtown.json"));
    return m;
}

std::vector<std::string> tool_names(const nlohmann::json& catalog)
{
    std::vector<std::string> out;
    for (const auto& t : catalog)
        out.push_back(t["name"]);
    return out;
}

} // namespace

TEST(Presets, RangeAndCumulativeFlags)
{
    EXPECT_THROW(preset(0), Error);
    EXPECT_THROW(preset(9), Error);
    for (int i = 1; i < kPresetCount; ++i)
    {
        const auto& a = preset(i);
        const auto& b = preset(i + 1);
        EXPECT_EQ(a.iteration, i);
        // a block switched on stays on
        EXPECT_LE(a.grounding, b.grounding);
        EXPECT_LE(a.poi_list, b.poi_list);
        EXPECT_LE(a.local_frame, b.local_frame);
        EXPECT_LE(a.intersection_types, b.intersection_types);
        EXPECT_LE(a.spatial_tools, b.spatial_tools);
        EXPECT_LE(a.poi_tools, b.poi_tools);
        EXPECT_LE(a.navigation_tools, b.navigation_tools);
    }
    EXPECT_EQ(preset(1).pcd, PcdStyle::PositionText);
    EXPECT_EQ(preset(2).pcd, PcdStyle::CameraImage);
    EXPECT_EQ(preset(3).pcd, PcdStyle::MarkerImage);
    EXPECT_EQ(preset(4).graph, GraphFormat::Structured);
    EXPECT_EQ(preset(5).graph, GraphFormat::Text);
}

TEST(Presets, ToolCatalogs)
{
    EXPECT_TRUE(tool_catalog(preset(5)).empty());
    EXPECT_EQ(tool_names(tool_catalog(preset(6))),
              (std::vector<std::string>{"distance", "is_near", "pois_near", "closest_edge", "get_route"}));
    const auto seven = tool_names(tool_catalog(preset(7)));
    EXPECT_NE(std::find(seven.begin(), seven.end(), "remember_bookmark"), seven.end());
    EXPECT_EQ(std::find(seven.begin(), seven.end(), "start_fly_me_there"), seven.end());
    const auto eight = tool_names(tool_catalog(preset(8)));
    EXPECT_EQ(eight.back(), "start_fly_me_there");
    EXPECT_EQ(eight.size(), 10u);
}

TEST(SystemInstructions, TwoSectionsAndStableHash)
{
    for (int i = 1; i <= kPresetCount; ++i)
    {
        const auto s = build_system_instructions(midtown(), i);
        EXPECT_EQ(s.text.rfind("# Answering instructions\n", 0), 0u) << i;
        EXPECT_NE(s.text.find("\n# Map contextual information\n"), std::string::npos) << i;
        EXPECT_EQ(s.hash(), build_system_instructions(midtown(), i).hash());
        EXPECT_EQ(s.hash(), fnv1a_hex(s.text));
        EXPECT_TRUE(fx::matches_golden("system_preset" + std::to_string(i) + ".txt", s.text)) << i;
    }
}

TEST(SystemInstructions, BlocksFollowPreset)
{
    const auto one = build_system_instructions(midtown(), 1).text;
    const auto eight = build_system_instructions(midtown(), 8).text;
    EXPECT_EQ(one.find("Cooper Electrics"), std::string::npos);
    EXPECT_NE(eight.find("Cooper Electrics"), std::string::npos);
    EXPECT_NE(eight.find("The scale of the map is: 60m: 1cm"), std::string::npos);
    EXPECT_NE(eight.find("a T intersection"), std::string::npos);
    EXPECT_EQ(build_system_instructions(midtown(), 6).text.find("a T intersection"), std::string::npos);
}

TEST(SystemInstructions, HiddenPoiListedButMarked)
{
    const auto ctx = build_map_context(midtown(), preset(8)).text;
    EXPECT_NE(ctx.find("Cooper Electrics"), std::string::npos);
}

TEST(Fnv, KnownVectors)
{
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
    EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(Pcd, StructuredPositionOnEdge)
{
    const auto pcd = generate_pcd(Point2D{300, 340}, midtown(), parse_wall_time("Monday 14:30"));
    ASSERT_TRUE(pcd.edge);
    EXPECT_EQ(pcd.edge->edge_id, "e01");
    EXPECT_NEAR(pcd.edge->dist_from_n1_m + pcd.edge->dist_from_n2_m, 310.0, 1e-6);
    EXPECT_NE(pcd.text.find("100 m from the intersection with 5th Avenue"), std::string::npos);
    EXPECT_NE(pcd.text.find("210 m from the intersection with 6th Avenue"), std::string::npos);
    EXPECT_NE(pcd.text.find("Monday 14:30"), std::string::npos);
}

TEST(Pcd, NoPosition)
{
    const auto pcd = generate_pcd(std::nullopt, midtown(), parse_wall_time("Sunday 08:00"));
    EXPECT_FALSE(pcd.edge);
    EXPECT_NE(pcd.text.find("Sunday 08:00"), std::string::npos);
}

TEST(Pcd, ImagePresetsDescribePayload)
{
    const auto cam = generate_pcd(Point2D{300, 340}, midtown(), {}, preset(2));
    const auto marker = generate_pcd(Point2D{300, 340}, midtown(), {}, preset(3));
    EXPECT_NE(cam.text.find("[image payload:"), std::string::npos);
    EXPECT_NE(marker.text.find("[image payload:"), std::string::npos);
    EXPECT_NE(cam.text, marker.text);
}

TEST(Combine, RoundTrip)
{
    const auto c = combine("Where am I?", "pcd text");
    EXPECT_EQ(c.text, "pcd text\n[Question]\nWhere am I?");
    const auto back = split_combined(c.text);
    EXPECT_EQ(back.pcd, "pcd text");
    EXPECT_EQ(back.user_text, "Where am I?");
    EXPECT_THROW(split_combined("no separator"), Error);
}
