// SPDX-License-Identifier: Apache-2.0
#include "mapio/prompt.hpp"

#include "mapio/error.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <array>
#include <cmath>
#include <cstdint>

namespace mapio::prompt {

using nlohmann::json;

namespace {

constexpr std::array<Preset, kPresetCount> kPresets = {{
    // iteration, grounding, poi_list, local_frame, graph, types, pcd, spatial, poi, navigation
    {1, false, false, false, GraphFormat::None, false, PcdStyle::PositionText, false, false, false},
    {2, true, true, false, GraphFormat::None, false, PcdStyle::CameraImage, false, false, false},
    {3, true, true, false, GraphFormat::None, false, PcdStyle::MarkerImage, false, false, false},
    {4, true, true, true, GraphFormat::Structured, false, PcdStyle::Structured, false, false, false},
    {5, true, true, true, GraphFormat::Text, false, PcdStyle::Structured, false, false, false},
    {6, true, true, true, GraphFormat::Text, false, PcdStyle::Structured, true, false, false},
    {7, true, true, true, GraphFormat::Text, true, PcdStyle::Structured, true, true, false},
    {8, true, true, true, GraphFormat::Text, true, PcdStyle::Structured, true, true, true},
}};

constexpr double kAtIntersection = 12.0; // meters, for the prose position description

const json kLocation = {
    {"description", "A location: {\"x\": meters, \"y\": meters}, {\"poi\": id or name}, {\"node\": id}, "
                    "{\"bookmark\": alias}, or {\"here\": true} for the pointed position."},
    {"type", json::array({"object", "string"})},
};

json poi_tools()
{
    return json::array({
        {{"name", "make_poi_discoverable"},
         {"description", "Make a POI discoverable on the map, so that its name is read when the user points at it."},
         {"parameters", {{"type", "object"}, {"properties", {{"poi", kLocation}}}, {"required", json::array({"poi"})}}}},
        {{"name", "remember_bookmark"},
         {"description", "Remember a POI under an alias chosen by the user, such as \"my hotel\"."},
         {"parameters",
          {{"type", "object"},
           {"properties", {{"alias", {{"type", "string"}}}, {"poi", kLocation}}},
           {"required", json::array({"alias", "poi"})}}}},
        {{"name", "resolve_bookmark"},
         {"description", "Look up the POI remembered under an alias."},
         {"parameters",
          {{"type", "object"}, {"properties", {{"alias", {{"type", "string"}}}}}, {"required", json::array({"alias"})}}}},
    });
}

json navigation_tools()
{
    return json::array({
        {{"name", "start_street_navigation"},
         {"description", "Start street-by-street navigation from the pointed position (or `from`) to a destination. "
                         "The user hears one step at a time; the next step is given automatically."},
         {"parameters",
          {{"type", "object"},
           {"properties", {{"to", kLocation}, {"from", kLocation}}},
           {"required", json::array({"to"})}}}},
        {{"name", "start_fly_me_there"},
         {"description", "Start fly-me-there guidance: the user hears the cardinal direction in which to move the "
                         "finger to reach the destination."},
         {"parameters",
          {{"type", "object"}, {"properties", {{"to", kLocation}}}, {"required", json::array({"to"})}}}},
    });
}

std::string tool_listing(const json& tools)
{
    std::string out;
    for (const auto& t : tools)
        out += fmt::format("- {}: {}\n", t.at("name").get<std::string>(), t.at("description").get<std::string>());
    return out;
}

std::string geo_text(const GeoCoord& g)
{
    return fmt::format("{:.6f}, {:.6f}", g.lat, g.lon);
}

std::string poi_listing(const MapModel& model, const Preset& p)
{
    std::string out = "Points of interest on the map:\n";
    if (model.pois().empty())
        return out + "(none)\n";
    for (const auto& poi : model.pois())
    {
        out += fmt::format("- {} ({})", poi.name, poi.category.empty() ? std::string("place") : poi.category);
        out += fmt::format(". Location (lat, lon): {}", geo_text(model.frame().to_geo(poi.position)));
        if (p.local_frame)
        {
            const auto f = poi_position_formats(poi, model);
            out += fmt::format(". Local position: ({}, {})", format_meters(f.local.x), format_meters(f.local.y));
            out += ". Closest edge: " + f.edge_ref;
        }
        if (!poi.address.empty())
            out += ". Address: " + poi.address;
        if (!poi.description.empty())
        {
            std::string d = poi.description;
            while (!d.empty() && d.back() == '.')
                d.pop_back();
            out += ". Description: " + d;
        }
        out += ". Opening hours: " + poi.opening_hours.describe();
        if (!poi.facilities.empty())
            out += ". Facilities: " + detail::join(poi.facilities, ", ");
        out += ". Accessibility: " +
               (poi.accessibility.empty() ? std::string("no information") : detail::join(poi.accessibility, ", "));
        out += ".\n";
    }
    return out;
}

} // namespace

const Preset& preset(int iteration)
{
    if (iteration < 1 || iteration > kPresetCount)
        fail(ErrorKind::Validation, fmt::format("preset must be between 1 and {}, got {}", kPresetCount, iteration));
    return kPresets[static_cast<std::size_t>(iteration - 1)];
}

json tool_catalog(const Preset& p)
{
    json tools = json::array();
    if (p.spatial_tools)
    {
        for (auto& t : spatial::tool_catalog())
            tools.push_back(t);
    }
    if (p.poi_tools)
    {
        for (auto& t : poi_tools())
            tools.push_back(t);
    }
    if (p.navigation_tools)
    {
        for (auto& t : navigation_tools())
            tools.push_back(t);
    }
    return tools;
}

AnsweringInstructions build_answering_instructions(const Preset& p)
{
    AnsweringInstructions a;
    a.tools = tool_catalog(p);
    std::string& t = a.text;
    t += "You are a long-time resident of this neighborhood. You are helping a blind person who explores a tactile "
         "map of the area with a finger and asks you questions about it. Keep a friendly, conversational tone. "
         "Answer directly, with a detailed yet concise answer that is easy to follow by ear. If a question is "
         "ambiguous or unclear, ask for clarification first. Each question comes with a short description of where "
         "the user is pointing on the map and of the current time.\n";
    if (p.grounding)
        t += "Answer only from the information given in these instructions and in the question context. When that "
             "information is not enough, say so plainly and suggest how the user could find the answer.\n";
    if (p.spatial_tools)
        t += "Do not estimate distances, proximity or routes yourself; call the tools below and base the answer on "
             "their results. Distances are in meters; walking times assume 1.2 meters per second.\n";
    if (p.poi_tools)
        t += "When giving directions, give only the first step and invite the user to ask for the next one. When the "
             "user looks for a place, make it discoverable so that it is announced when pointed at. When the user "
             "asks you to remember a place under a name, store it as a bookmark and resolve that name in later "
             "questions.\n";
    if (p.navigation_tools)
        t += "Two guidance modes are available. If the user asks to be guided to a place, start fly-me-there "
             "guidance, which tells the user the cardinal direction in which to move the finger. If the user asks to "
             "be navigated to a place or asks for directions, start street-by-street navigation, which gives one "
             "step at a time. If it is unclear which mode the user wants, ask. Examples:\n"
             "Q: Guide me to the pharmacy. A: Fly-me-there guidance to the pharmacy has started; follow the "
             "direction cues.\n"
             "Q: Navigate me to the pharmacy. A: Street-by-street navigation has started. <first step>.\n"
             "Q: Give me directions to the pharmacy. A: Street-by-street navigation has started. <first step>.\n"
             "Q: Take me to the pharmacy. A: Would you like fly-me-there guidance or street-by-street navigation?\n";
    if (!a.tools.empty())
        t += "Tools:\n" + tool_listing(a.tools);
    return a;
}

MapContextualInformation build_map_context(const MapModel& model, const Preset& p)
{
    MapContextualInformation c;
    std::string& t = c.text;
    const auto& f = model.frame();
    t += "Area: " + model.area_description() + "\n";
    if (p.poi_list)
    {
        if (!f.map_name.empty())
            t += "Map name: " + f.map_name + "\n";
        t += fmt::format("Map corners (lat, lon): north-west {}; north-east {}; south-east {}; south-west {}.\n",
                         geo_text(f.corners[0]), geo_text(f.corners[1]), geo_text(f.corners[2]),
                         geo_text(f.corners[3]));
        t += "The scale of the map is: " + f.scale_text + "\n";
    }
    if (p.local_frame)
    {
        t += fmt::format("Local reference system: positions are (x, y) in meters, x grows toward east and y toward "
                         "north; the map spans from (0, 0) at the south-west corner to ({}, {}) at the north-east "
                         "corner. Distances between positions equal real distances in meters.\n",
                         format_meters(f.width_m), format_meters(f.height_m));
        const auto& s = f.surroundings;
        t += fmt::format("Beyond the map: to the north {}; to the east {}; to the south {}; to the west {}.\n",
                         s.north.empty() ? "unknown" : s.north, s.east.empty() ? "unknown" : s.east,
                         s.south.empty() ? "unknown" : s.south, s.west.empty() ? "unknown" : s.west);
    }
    if (p.poi_list)
        t += poi_listing(model, p);
    switch (p.graph)
    {
        case GraphFormat::None: break;
        case GraphFormat::Structured: t += "Road graph:\n" + serialize_graph_structured(model); break;
        case GraphFormat::Text:
            t += "Road graph:\n" + serialize_graph_text(model, {.intersection_types = p.intersection_types});
            break;
    }
    return c;
}

std::string SystemInstructions::hash() const
{
    return fnv1a_hex(text);
}

SystemInstructions build_system_instructions(const MapModel& model, int preset_iteration)
{
    const Preset& p = preset(preset_iteration);
    SystemInstructions s;
    s.preset = p.iteration;
    s.answering = build_answering_instructions(p);
    s.map_context = build_map_context(model, p);
    s.text = "# Answering instructions\n" + s.answering.text + "\n# Map contextual information\n" + s.map_context.text;
    return s;
}

PromptContextualData generate_pcd(const std::optional<Point2D>& position, const MapModel& model, const WallTime& now,
                                  const Preset& p)
{
    PromptContextualData pcd;
    std::string& t = pcd.text;
    const std::string time = "The current time is: " + format_wall_time(now) + ".";

    if (position && !model.edges().empty())
        pcd.edge = spatial::closest_edge(*position, model);

    switch (p.pcd)
    {
        case PcdStyle::CameraImage:
            t = position ? "[image payload: camera frame showing the map and the user's pointing hand]"
                         : "[image payload: camera frame showing the map, no pointing hand]";
            t += "\n" + time;
            return pcd;
        case PcdStyle::MarkerImage:
            t = position ? fmt::format("[image payload: map rendering with a marker at ({}, {})]",
                                       format_meters(position->x), format_meters(position->y))
                         : std::string("[image payload: map rendering without a marker]");
            t += "\n" + time;
            return pcd;
        case PcdStyle::PositionText:
        case PcdStyle::Structured: break;
    }

    if (!pcd.edge)
    {
        t = "I'm not pointing at any location on the map. " + time;
        return pcd;
    }

    const auto& proj = *pcd.edge;
    const auto& e = model.edge(proj.edge_id);
    const std::string n1_cross = model.cross_street(e.n1, e.street_name);
    const std::string n2_cross = model.cross_street(e.n2, e.street_name);
    const bool n1_nearer = proj.dist_from_n1_m <= proj.dist_from_n2_m;
    const auto& near_node = n1_nearer ? e.n1 : e.n2;
    const double near_d = n1_nearer ? proj.dist_from_n1_m : proj.dist_from_n2_m;

    if (p.pcd == PcdStyle::PositionText)
    {
        if (near_d <= kAtIntersection)
            t = "I'm at the intersection between " + model.intersection_name(near_node) + ". " + time;
        else
            t = fmt::format("I'm on {}, between {} and {}. {}", e.street_name, n1_cross, n2_cross, time);
        return pcd;
    }

    t = fmt::format("I'm pointing at ({}, {}) in the local reference system. The closest point on the road network "
                    "is on edge {} - {}, which is part of {}, between {} and {}. ",
                    format_meters(position->x), format_meters(position->y), e.n1, e.n2, e.street_name, n1_cross,
                    n2_cross);
    if (n1_nearer)
        t += fmt::format("I'm at a distance of {} from the intersection with {} and {} from the intersection with {}.",
                         format_meters(proj.dist_from_n1_m), n1_cross, format_meters(proj.dist_from_n2_m), n2_cross);
    else
        t += fmt::format("I'm at a distance of {} from the intersection with {} and {} from the intersection with {}.",
                         format_meters(proj.dist_from_n2_m), n2_cross, format_meters(proj.dist_from_n1_m), n1_cross);
    if (p.intersection_types)
        t += fmt::format(" The closest intersection, with {}, is {}.", n1_nearer ? n1_cross : n2_cross,
                         describe(model.node(near_node).type));
    t += " " + time;
    return pcd;
}

CombinedPrompt combine(std::string_view user_text, std::string_view pcd)
{
    CombinedPrompt c;
    c.pcd = std::string(pcd);
    c.user_text = std::string(user_text);
    c.text = c.pcd + std::string(kQuestionSeparator) + c.user_text;
    return c;
}

CombinedPrompt split_combined(std::string_view text)
{
    const auto pos = text.find(kQuestionSeparator);
    if (pos == std::string_view::npos)
        fail(ErrorKind::Validation, "combined prompt has no question separator");
    CombinedPrompt c;
    c.pcd = std::string(text.substr(0, pos));
    c.user_text = std::string(text.substr(pos + kQuestionSeparator.size()));
    c.text = std::string(text);
    return c;
}

std::string fnv1a_hex(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

} // namespace mapio::prompt
