// SPDX-License-Identifier: Apache-2.0
#include "mapio/spatial.hpp"

#include "mapio/error.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>

namespace mapio::spatial {

using nlohmann::json;

double distance(Point2D p, Point2D q)
{
    return mapio::distance(p, q);
}

double distance(Point2D p, const Poi& poi)
{
    return mapio::distance(p, poi.position);
}

bool is_near(Point2D p, const Poi& poi, double threshold_m)
{
    return distance(p, poi) <= threshold_m;
}

std::vector<PoiDistance> pois_near(Point2D p, double radius_m, const MapModel& model)
{
    std::vector<PoiDistance> out;
    for (const auto& poi : model.pois())
    {
        const double d = distance(p, poi);
        if (d <= radius_m)
            out.push_back({&poi, d});
    }
    std::stable_sort(out.begin(), out.end(), [](const PoiDistance& a, const PoiDistance& b) {
        if (a.distance_m != b.distance_m)
            return a.distance_m < b.distance_m;
        return a.poi->id < b.poi->id;
    });
    return out;
}

EdgeProjection project_onto_edge(Point2D p, const Edge& edge, const MapModel& model)
{
    const auto& a = model.node(edge.n1).position;
    const auto& b = model.node(edge.n2).position;
    const auto proj = project_onto_segment(p, a, b);
    EdgeProjection out;
    out.edge_id = edge.id;
    out.street_name = edge.street_name;
    out.point = proj.point;
    out.distance_m = proj.distance;
    out.dist_from_n1_m = proj.t * edge.length;
    out.dist_from_n2_m = edge.length - out.dist_from_n1_m;
    return out;
}

EdgeProjection closest_edge(Point2D p, const MapModel& model)
{
    if (model.edges().empty())
        fail(ErrorKind::Degenerate, "map has no edges to project onto");
    std::optional<EdgeProjection> best;
    for (const auto& e : model.edges()) // sorted by id, so strict < keeps the smaller id on ties
    {
        auto cand = project_onto_edge(p, e, model);
        if (!best || cand.distance_m < best->distance_m)
            best = std::move(cand);
    }
    return *best;
}

IntersectionType classify_degree(std::size_t degree, std::optional<IntersectionType> authored)
{
    if (authored)
        return *authored;
    if (degree == 3)
        return IntersectionType::T;
    if (degree == 4)
        return IntersectionType::FourWay;
    return IntersectionType::Other;
}

IntersectionType intersection_type(const Node& node, const MapModel& model)
{
    return classify_degree(model.incident_edges(node.id).size(), node.authored_type);
}

int Route::block_count() const
{
    int n = 0;
    for (const auto& l : legs)
        n += l.blocks;
    return n;
}

EdgeProjection attach(const Endpoint& endpoint, const MapModel& model)
{
    if (const auto* p = std::get_if<Point2D>(&endpoint))
        return closest_edge(*p, model);
    if (const auto* n = std::get_if<NodeRef>(&endpoint))
    {
        const auto& node = model.node(n->id);
        const auto& incident = model.incident_edges(node.id);
        if (incident.empty())
            fail(ErrorKind::Unreachable, "node '" + node.id + "' has no street segments");
        return project_onto_edge(node.position, model.edge(incident.front()), model);
    }
    const auto& poi = model.poi(std::get<PoiRef>(endpoint).id);
    const auto& e = model.edge(poi.closest_edge.edge_id);
    return project_onto_edge(poi.position, e, model);
}

Point2D position_of(const Endpoint& endpoint, const MapModel& model)
{
    if (const auto* p = std::get_if<Point2D>(&endpoint))
        return *p;
    if (const auto* n = std::get_if<NodeRef>(&endpoint))
        return model.node(n->id).position;
    return model.poi(std::get<PoiRef>(endpoint).id).position;
}

namespace {

constexpr double kOnNode = 1e-9;          // meters
constexpr double kLengthTie = 1e-9;       // relative tolerance when comparing path lengths
constexpr std::string_view kStart = "@start";
constexpr std::string_view kEnd = "@end";

struct Arc
{
    std::string to;
    std::string edge_id;
    double length = 0.0;
};

struct Anchor
{
    std::string vertex;
    Point2D position;
    std::optional<std::string> node_id;
    // set when the anchor splits an edge
    std::optional<EdgeProjection> split;
};

Anchor make_anchor(const Endpoint& endpoint, const MapModel& model, std::string_view virtual_id)
{
    if (const auto* n = std::get_if<NodeRef>(&endpoint))
    {
        const auto& node = model.node(n->id);
        return {node.id, node.position, node.id, std::nullopt};
    }
    auto proj = attach(endpoint, model);
    const auto& e = model.edge(proj.edge_id);
    if (proj.dist_from_n1_m <= kOnNode)
    {
        const auto& node = model.node(e.n1);
        return {node.id, node.position, node.id, std::nullopt};
    }
    if (proj.dist_from_n2_m <= kOnNode)
    {
        const auto& node = model.node(e.n2);
        return {node.id, node.position, node.id, std::nullopt};
    }
    return {std::string(virtual_id), proj.point, std::nullopt, proj};
}

bool allows(const Edge& e, bool forward, const RouteOptions& options)
{
    if (options.walking || !e.one_way)
        return true;
    return (*e.one_way == OneWay::Forward) == forward;
}

struct PathLabel
{
    double dist = std::numeric_limits<double>::infinity();
    std::vector<std::string> vertices;
    std::vector<std::string> edges;
};

bool better(const PathLabel& a, const PathLabel& b)
{
    const double scale = std::max(1.0, std::max(std::abs(a.dist), std::abs(b.dist)));
    if (std::abs(a.dist - b.dist) > kLengthTie * scale)
        return a.dist < b.dist;
    if (a.vertices != b.vertices)
        return a.vertices < b.vertices;
    return a.edges < b.edges;
}

} // namespace

Route shortest_route(const Endpoint& from, const Endpoint& to, const MapModel& model, const RouteOptions& options)
{
    const Anchor src = make_anchor(from, model, kStart);
    const Anchor dst = make_anchor(to, model, kEnd);

    Route route;
    const bool same_split = src.split && dst.split && src.split->edge_id == dst.split->edge_id;
    if (src.vertex == dst.vertex ||
        (same_split && std::abs(src.split->dist_from_n1_m - dst.split->dist_from_n1_m) <= kOnNode))
    {
        route.waypoints.push_back({src.node_id, src.position});
        return route;
    }

    std::map<std::string, std::vector<Arc>, std::less<>> adj;
    std::map<std::string, Point2D, std::less<>> where;
    for (const auto& n : model.nodes())
        where[n.id] = n.position;
    where[src.vertex] = src.position;
    where[dst.vertex] = dst.position;

    auto add = [&](const std::string& a, const std::string& b, const Edge& e, double len, bool forward) {
        if (allows(e, forward, options))
            adj[a].push_back({b, e.id, len});
        if (allows(e, !forward, options))
            adj[b].push_back({a, e.id, len});
    };

    // Split anchors replace their edge with pieces; two anchors on one edge split it in three.
    std::set<std::string> split_edges;
    if (src.split)
        split_edges.insert(src.split->edge_id);
    if (dst.split)
        split_edges.insert(dst.split->edge_id);

    for (const auto& e : model.edges())
    {
        if (!split_edges.count(e.id))
        {
            add(e.n1, e.n2, e, e.length, true);
            continue;
        }
        std::vector<std::pair<double, std::string>> cuts = {{0.0, e.n1}, {e.length, e.n2}};
        if (src.split && src.split->edge_id == e.id)
            cuts.emplace_back(src.split->dist_from_n1_m, src.vertex);
        if (dst.split && dst.split->edge_id == e.id)
            cuts.emplace_back(dst.split->dist_from_n1_m, dst.vertex);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            add(cuts[i].second, cuts[i + 1].second, e, cuts[i + 1].first - cuts[i].first, true);
    }

    std::map<std::string, PathLabel, std::less<>> best;
    std::set<std::string> settled;
    std::set<std::pair<double, std::string>> frontier;
    best[src.vertex] = {0.0, {src.vertex}, {}};
    frontier.insert({0.0, src.vertex});

    while (!frontier.empty())
    {
        auto [d, v] = *frontier.begin();
        frontier.erase(frontier.begin());
        if (settled.count(v) || best[v].dist != d)
            continue;
        settled.insert(v);
        if (v == dst.vertex)
            break;
        const PathLabel cur = best[v];
        auto it = adj.find(v);
        if (it == adj.end())
            continue;
        for (const auto& arc : it->second)
        {
            if (settled.count(arc.to))
                continue;
            PathLabel cand{cur.dist + arc.length, cur.vertices, cur.edges};
            cand.vertices.push_back(arc.to);
            cand.edges.push_back(arc.edge_id);
            auto found = best.find(arc.to);
            if (found == best.end() || better(cand, found->second))
            {
                if (found != best.end())
                    frontier.erase({found->second.dist, arc.to});
                frontier.insert({cand.dist, arc.to});
                best[arc.to] = std::move(cand);
            }
        }
    }

    auto reached = best.find(dst.vertex);
    if (reached == best.end() || !settled.count(dst.vertex))
        fail(ErrorKind::Unreachable, "no route between the requested endpoints");

    const PathLabel& path = reached->second;
    for (const auto& v : path.vertices)
    {
        std::optional<std::string> node_id;
        if (v == src.vertex)
            node_id = src.node_id;
        else if (v == dst.vertex)
            node_id = dst.node_id;
        else
            node_id = v;
        route.waypoints.push_back({node_id, where.at(v)});
    }
    for (std::size_t i = 0; i < path.edges.size(); ++i)
    {
        const auto& e = model.edge(path.edges[i]);
        RouteLeg leg;
        leg.edge_id = e.id;
        leg.street_name = e.street_name;
        leg.from = i;
        leg.to = i + 1;
        leg.length_m = mapio::distance(route.waypoints[i].position, route.waypoints[i + 1].position);
        route.total_length_m += leg.length_m;
        route.legs.push_back(std::move(leg));
    }
    return route;
}

// ---------------------------------------------------------------------------------------

Cardinal cardinal_of(Point2D v)
{
    if (v.x == 0.0 && v.y == 0.0)
        fail(ErrorKind::Degenerate, "cardinal direction of a zero vector");
    const double bearing = std::atan2(v.x, v.y) * 180.0 / std::numbers::pi;
    // Sector k covers bearings in (45k - 22.5, 45k + 22.5].
    const int k = static_cast<int>(std::ceil((bearing - 22.5) / 45.0));
    return static_cast<Cardinal>(((k % 8) + 8) % 8);
}

std::string_view cardinal_name(Cardinal c)
{
    static constexpr std::array<std::string_view, 8> names = {
        "north", "north-east", "east", "south-east", "south", "south-west", "west", "north-west"};
    return names[static_cast<std::size_t>(c)];
}

std::string_view cardinal_symbol(Cardinal c)
{
    static constexpr std::array<std::string_view, 8> names = {"N", "NE", "E", "SE", "S", "SW", "W", "NW"};
    return names[static_cast<std::size_t>(c)];
}

double cardinal_bearing(Cardinal c)
{
    return 45.0 * static_cast<int>(c);
}

namespace {

std::string accessibility_note(const RouteLeg& leg, const MapModel& model)
{
    const auto& e = model.edge(leg.edge_id);
    std::vector<std::string> parts = e.accessibility;
    if (e.slope && std::abs(*e.slope) >= 0.0005)
        parts.push_back(fmt::format("slope {:.1f}%", std::abs(*e.slope) * 100.0));
    if (parts.empty())
        return {};
    return fmt::format("{} ({} - {}): {}", e.street_name, e.n1, e.n2, detail::join(parts, ", "));
}

} // namespace

std::vector<Instruction> route_instructions(const Route& route, const MapModel& model, Verbosity verbosity)
{
    std::vector<Instruction> out;
    std::size_t i = 0;
    while (i < route.legs.size())
    {
        std::size_t j = i;
        while (j + 1 < route.legs.size() && route.legs[j + 1].street_name == route.legs[i].street_name)
            ++j;

        Instruction ins;
        ins.street_name = route.legs[i].street_name;
        ins.first_leg = i;
        ins.leg_count = j - i + 1;
        ins.end_waypoint = route.legs[j].to;
        for (std::size_t k = i; k <= j; ++k)
        {
            ins.blocks += route.legs[k].blocks;
            ins.length_m += route.legs[k].length_m;
        }
        Point2D delta = route.waypoints[route.legs[j].to].position - route.waypoints[route.legs[i].from].position;
        if (delta.x == 0.0 && delta.y == 0.0)
            delta = route.waypoints[route.legs[i].to].position - route.waypoints[route.legs[i].from].position;
        ins.heading = (delta.x == 0.0 && delta.y == 0.0) ? Cardinal::N : cardinal_of(delta);

        ins.text = fmt::format("Head {} on {} for {} block{} ({})", cardinal_name(ins.heading), ins.street_name,
                               ins.blocks, ins.blocks == 1 ? "" : "s", format_meters(ins.length_m));
        if (verbosity == Verbosity::Accessible)
        {
            for (std::size_t k = i; k <= j; ++k)
            {
                auto note = accessibility_note(route.legs[k], model);
                if (!note.empty())
                    ins.notes.push_back(std::move(note));
            }
            if (!ins.notes.empty())
                ins.text += ". Accessibility: " + detail::join(ins.notes, "; ");
        }
        out.push_back(std::move(ins));
        i = j + 1;
    }
    return out;
}

double walking_time_s(double length_m, double speed_mps)
{
    if (!(speed_mps > 0.0))
        fail(ErrorKind::Validation, "walking speed must be positive");
    return length_m / speed_mps;
}

std::string format_duration(double seconds)
{
    const long total = std::lround(seconds);
    if (total < 60)
        return fmt::format("{} second{}", total, total == 1 ? "" : "s");
    const long minutes = std::lround(seconds / 60.0);
    return fmt::format("{} minute{}", minutes, minutes == 1 ? "" : "s");
}

json tool_catalog()
{
    const json location = {
        {"description", "A location: {\"x\": meters, \"y\": meters} in the local reference system, "
                        "{\"poi\": id or name}, {\"node\": id}, {\"bookmark\": alias}, or {\"here\": true} for the "
                        "position the user is pointing at."},
        {"type", json::array({"object", "string"})},
    };
    return json::array({
        {{"name", "distance"},
         {"description", "Straight-line distance in meters between two locations (points or POIs). Optionally the "
                         "walking time along the streets."},
         {"parameters",
          {{"type", "object"},
           {"properties",
            {{"from", location},
             {"to", location},
             {"walking_time", {{"type", "boolean"}, {"description", "Also return the walking time in seconds."}}}}},
           {"required", json::array({"from", "to"})}}}},
        {{"name", "is_near"},
         {"description", "Whether a position is close to a given POI."},
         {"parameters",
          {{"type", "object"},
           {"properties",
            {{"position", location},
             {"poi", location},
             {"threshold_m", {{"type", "number"}, {"description", "Closeness threshold in meters."}}}}},
           {"required", json::array({"position", "poi"})}}}},
        {{"name", "pois_near"},
         {"description", "POIs within a radius of a point, nearest first."},
         {"parameters",
          {{"type", "object"},
           {"properties", {{"position", location}, {"radius_m", {{"type", "number"}}}}},
           {"required", json::array({"position", "radius_m"})}}}},
        {{"name", "closest_edge"},
         {"description", "The street segment closest to a point, with distances to both of its intersections."},
         {"parameters",
          {{"type", "object"}, {"properties", {{"position", location}}}, {"required", json::array({"position"})}}}},
        {{"name", "get_route"},
         {"description", "Step-by-step walking instructions between two locations, using cardinal directions, "
                         "blocks and meters."},
         {"parameters",
          {{"type", "object"},
           {"properties",
            {{"from", location},
             {"to", location},
             {"walking_time", {{"type", "boolean"}}},
             {"accessible", {{"type", "boolean"}, {"description", "Include accessibility notes for each step."}}}}},
           {"required", json::array({"from", "to"})}}}},
    });
}

} // namespace mapio::spatial
