// SPDX-License-Identifier: Apache-2.0
#include "mapio/map_model.hpp"

#include "json_util.hpp"
#include "mapio/error.hpp"
#include "mapio/spatial.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <queue>
#include <set>
#include <sstream>

namespace mapio {

using nlohmann::json;
using namespace detail;

std::string_view to_string(IntersectionType t)
{
    switch (t)
    {
        case IntersectionType::T: return "T";
        case IntersectionType::FourWay: return "4-way";
        case IntersectionType::Other: return "other";
    }
    return "other";
}

std::string_view describe(IntersectionType t)
{
    switch (t)
    {
        case IntersectionType::T: return "a T intersection";
        case IntersectionType::FourWay: return "a 4-way intersection";
        case IntersectionType::Other: return "an irregular intersection";
    }
    return "an irregular intersection";
}

IntersectionType parse_intersection_type(std::string_view text)
{
    const auto key = lower(text);
    if (key == "t")
        return IntersectionType::T;
    if (key == "4-way" || key == "fourway" || key == "4way")
        return IntersectionType::FourWay;
    if (key == "other")
        return IntersectionType::Other;
    fail(ErrorKind::Validation, "unknown intersection type '" + std::string(text) + "'");
}

GeoCoord ReferenceFrame::to_geo(Point2D p) const
{
    const double u = width_m > 0 ? p.x / width_m : 0.0;
    const double v = height_m > 0 ? p.y / height_m : 0.0;
    const auto& nw = corners[0];
    const auto& ne = corners[1];
    const auto& se = corners[2];
    const auto& sw = corners[3];
    auto lerp = [](double a, double b, double t) { return a + (b - a) * t; };
    const double south_lat = lerp(sw.lat, se.lat, u);
    const double south_lon = lerp(sw.lon, se.lon, u);
    const double north_lat = lerp(nw.lat, ne.lat, u);
    const double north_lon = lerp(nw.lon, ne.lon, u);
    return {lerp(south_lat, north_lat, v), lerp(south_lon, north_lon, v)};
}

// ---------------------------------------------------------------------------------------
// lookups

const Node* MapModel::find_node(std::string_view id) const
{
    auto it = _node_index.find(id);
    return it == _node_index.end() ? nullptr : &_nodes[it->second];
}

const Edge* MapModel::find_edge(std::string_view id) const
{
    auto it = _edge_index.find(id);
    return it == _edge_index.end() ? nullptr : &_edges[it->second];
}

const Poi* MapModel::find_poi(std::string_view id) const
{
    auto it = _poi_index.find(id);
    return it == _poi_index.end() ? nullptr : &_pois[it->second];
}

const Poi* MapModel::find_poi_by_name(std::string_view name) const
{
    const auto key = lower(trim(name));
    for (const auto& p : _pois)
    {
        if (lower(p.name) == key)
            return &p;
    }
    return nullptr;
}

const Node& MapModel::node(std::string_view id) const
{
    if (const auto* n = find_node(id))
        return *n;
    fail(ErrorKind::NotFound, "unknown node '" + std::string(id) + "'");
}

const Edge& MapModel::edge(std::string_view id) const
{
    if (const auto* e = find_edge(id))
        return *e;
    fail(ErrorKind::NotFound, "unknown edge '" + std::string(id) + "'");
}

const Poi& MapModel::poi(std::string_view id) const
{
    if (const auto* p = find_poi(id))
        return *p;
    fail(ErrorKind::NotFound, "unknown POI '" + std::string(id) + "'");
}

const std::vector<std::string>& MapModel::incident_edges(std::string_view node_id) const
{
    static const std::vector<std::string> none;
    auto it = _incident.find(node_id);
    return it == _incident.end() ? none : it->second;
}

const Node& MapModel::opposite(const Edge& edge, std::string_view node_id) const
{
    return node(edge.n1 == node_id ? edge.n2 : edge.n1);
}

std::vector<std::string> MapModel::streets_at(std::string_view node_id, std::string_view except) const
{
    std::set<std::string> names;
    for (const auto& eid : incident_edges(node_id))
    {
        const auto& e = edge(eid);
        if (!e.street_name.empty() && e.street_name != except)
            names.insert(e.street_name);
    }
    return {names.begin(), names.end()};
}

std::string MapModel::intersection_name(std::string_view node_id) const
{
    const auto& n = node(node_id);
    if (!n.label.empty())
        return n.label;
    auto streets = streets_at(node_id);
    if (streets.empty())
        return n.id;
    return join_and(streets);
}

std::string MapModel::cross_street(std::string_view node_id, std::string_view street) const
{
    const auto& n = node(node_id);
    if (!n.label.empty())
        return n.label;
    auto others = streets_at(node_id, street);
    if (others.empty())
        return "the end of " + std::string(street);
    return join_and(others);
}

bool operator==(const MapModel& a, const MapModel& b)
{
    return a._frame == b._frame && a._nodes == b._nodes && a._edges == b._edges && a._pois == b._pois &&
           a._area_description == b._area_description;
}

// ---------------------------------------------------------------------------------------
// loading

class MapBuilder
{
public:
    static MapModel build(const json& doc);

private:
    static ReferenceFrame parse_frame(const json& v, const std::string& path);
    static Node parse_node(const json& v, const std::string& path);
    static Edge parse_edge(const json& v, const std::string& path);
    static Poi parse_poi(const json& v, const std::string& path, std::optional<EdgeRef>& authored_edge);
    static OpeningHours parse_hours(const json& v, const std::string& path);
    static void index(MapModel& m);
    static void derive(MapModel& m);
    static void check_connected(MapModel& m);
};

ReferenceFrame MapBuilder::parse_frame(const json& v, const std::string& path)
{
    ReferenceFrame f;
    f.map_name = string_or(v, "map_name", path);
    const auto& corners = as_array(require(v, "corners", path), child(path, "corners"));
    if (corners.size() != 4)
        schema_error(child(path, "corners"), "expected exactly 4 corners");
    for (std::size_t i = 0; i < 4; ++i)
    {
        const auto p = as_point(corners[i], child(child(path, "corners"), i));
        f.corners[i] = {p.x, p.y};
    }
    f.width_m = as_number(require(v, "width_m", path), child(path, "width_m"));
    f.height_m = as_number(require(v, "height_m", path), child(path, "height_m"));
    if (!(f.width_m > 0.0) || !std::isfinite(f.width_m))
        schema_error(child(path, "width_m"), "must be positive");
    if (!(f.height_m > 0.0) || !std::isfinite(f.height_m))
        schema_error(child(path, "height_m"), "must be positive");
    f.scale_text = as_string(require(v, "scale_text", path), child(path, "scale_text"));
    if (trim(f.scale_text).empty())
        schema_error(child(path, "scale_text"), "must not be empty");
    if (const json* s = optional_field(v, "surroundings"))
    {
        const auto sp = child(path, "surroundings");
        f.surroundings.north = string_or(*s, "north", sp);
        f.surroundings.east = string_or(*s, "east", sp);
        f.surroundings.south = string_or(*s, "south", sp);
        f.surroundings.west = string_or(*s, "west", sp);
    }
    return f;
}

Node MapBuilder::parse_node(const json& v, const std::string& path)
{
    Node n;
    n.id = as_string(require(v, "id", path), child(path, "id"));
    if (n.id.empty())
        schema_error(child(path, "id"), "must not be empty");
    n.position = as_point(require(v, "position", path), child(path, "position"));
    n.label = string_or(v, "label", path);
    if (const json* t = optional_field(v, "intersection_type"))
    {
        try
        {
            n.authored_type = parse_intersection_type(as_string(*t, child(path, "intersection_type")));
        }
        catch (const Error& e)
        {
            schema_error(child(path, "intersection_type"), e.what());
        }
    }
    if (const json* cs = optional_field(v, "crossings"))
    {
        const auto cp = child(path, "crossings");
        as_array(*cs, cp);
        for (std::size_t i = 0; i < cs->size(); ++i)
        {
            const auto ip = child(cp, i);
            const json& c = (*cs)[i];
            Crossing x;
            x.street = as_string(require(c, "street", ip), child(ip, "street"));
            x.crosswalk = bool_or(c, "crosswalk", ip, false);
            x.traffic_light = bool_or(c, "traffic_light", ip, false);
            x.audio_signal = bool_or(c, "audio_signal", ip, false);
            n.crossings.push_back(std::move(x));
        }
    }
    return n;
}

Edge MapBuilder::parse_edge(const json& v, const std::string& path)
{
    Edge e;
    e.id = as_string(require(v, "id", path), child(path, "id"));
    if (e.id.empty())
        schema_error(child(path, "id"), "must not be empty");
    const auto& ends = require(v, "endpoints", path);
    if (!ends.is_array() || ends.size() != 2)
        schema_error(child(path, "endpoints"), "expected [n1, n2]");
    e.n1 = as_string(ends[0], child(child(path, "endpoints"), 0));
    e.n2 = as_string(ends[1], child(child(path, "endpoints"), 1));
    e.street_name = as_string(require(v, "street_name", path), child(path, "street_name"));
    e.paving = string_or(v, "paving", path);
    if (const json* s = optional_field(v, "slope"))
        e.slope = as_number(*s, child(path, "slope"));
    if (const json* o = optional_field(v, "one_way"))
    {
        const auto dir = lower(as_string(*o, child(path, "one_way")));
        if (dir == "forward")
            e.one_way = OneWay::Forward;
        else if (dir == "backward")
            e.one_way = OneWay::Backward;
        else
            schema_error(child(path, "one_way"), "expected \"forward\" or \"backward\"");
    }
    e.accessibility = string_list(v, "accessibility", path);
    return e;
}

OpeningHours MapBuilder::parse_hours(const json& v, const std::string& path)
{
    OpeningHours h;
    if (!v.is_object())
        schema_error(path, "expected an object keyed by weekday");
    for (auto it = v.begin(); it != v.end(); ++it)
    {
        const auto dp = child(path, it.key());
        Weekday day{};
        try
        {
            day = parse_weekday(it.key());
        }
        catch (const Error&)
        {
            schema_error(dp, "unknown weekday");
        }
        as_array(*it, dp);
        auto& intervals = h.days[static_cast<std::size_t>(day)];
        for (std::size_t i = 0; i < it->size(); ++i)
        {
            const auto ip = child(dp, i);
            const json& iv = (*it)[i];
            if (!iv.is_array() || iv.size() != 2)
                schema_error(ip, "expected [\"HH:MM\", \"HH:MM\"]");
            MinuteInterval m;
            try
            {
                m.start = parse_clock(as_string(iv[0], ip));
                m.end = parse_clock(as_string(iv[1], ip));
            }
            catch (const Error& e)
            {
                schema_error(ip, e.what());
            }
            if (m.start >= kMinutesPerDay || m.start >= m.end)
                schema_error(ip, "interval must satisfy start < end within one day (split past-midnight hours at 00:00)");
            intervals.push_back(m);
        }
        std::sort(intervals.begin(), intervals.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
    }
    return h;
}

Poi MapBuilder::parse_poi(const json& v, const std::string& path, std::optional<EdgeRef>& authored_edge)
{
    Poi p;
    p.id = as_string(require(v, "id", path), child(path, "id"));
    if (p.id.empty())
        schema_error(child(path, "id"), "must not be empty");
    p.name = as_string(require(v, "name", path), child(path, "name"));
    p.category = string_or(v, "category", path);
    p.position = as_point(require(v, "position", path), child(path, "position"));
    p.address = string_or(v, "address", path);
    if (const json* ce = optional_field(v, "closest_edge"))
    {
        const auto cp = child(path, "closest_edge");
        EdgeRef r;
        r.edge_id = as_string(require(*ce, "edge", cp), child(cp, "edge"));
        r.offset_m = as_number(require(*ce, "offset_m", cp), child(cp, "offset_m"));
        authored_edge = r;
    }
    if (const json* oh = optional_field(v, "opening_hours"))
        p.opening_hours = parse_hours(*oh, child(path, "opening_hours"));
    p.facilities = string_list(v, "facilities", path);
    p.accessibility = string_list(v, "accessibility", path);
    p.description = string_or(v, "description", path);
    p.discoverable = bool_or(v, "discoverable", path, false);
    return p;
}

void MapBuilder::index(MapModel& m)
{
    auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
    std::sort(m._nodes.begin(), m._nodes.end(), by_id);
    std::sort(m._edges.begin(), m._edges.end(), by_id);
    std::sort(m._pois.begin(), m._pois.end(), by_id);
    for (std::size_t i = 0; i < m._nodes.size(); ++i)
    {
        if (!m._node_index.emplace(m._nodes[i].id, i).second)
            fail(ErrorKind::Validation, "duplicate node id '" + m._nodes[i].id + "'");
    }
    for (std::size_t i = 0; i < m._edges.size(); ++i)
    {
        if (!m._edge_index.emplace(m._edges[i].id, i).second)
            fail(ErrorKind::Validation, "duplicate edge id '" + m._edges[i].id + "'");
    }
    for (std::size_t i = 0; i < m._pois.size(); ++i)
    {
        if (!m._poi_index.emplace(m._pois[i].id, i).second)
            fail(ErrorKind::Validation, "duplicate POI id '" + m._pois[i].id + "'");
    }
}

void MapBuilder::derive(MapModel& m)
{
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    for (auto& e : m._edges)
    {
        const Node* a = m.find_node(e.n1);
        if (!a)
            fail(ErrorKind::Validation, "edge '" + e.id + "' references missing node '" + e.n1 + "'");
        const Node* b = m.find_node(e.n2);
        if (!b)
            fail(ErrorKind::Validation, "edge '" + e.id + "' references missing node '" + e.n2 + "'");
        if (e.n1 == e.n2)
            fail(ErrorKind::Validation, "edge '" + e.id + "' connects node '" + e.n1 + "' to itself");
        const auto key = std::make_tuple(std::min(e.n1, e.n2), std::max(e.n1, e.n2), e.street_name);
        if (!seen.insert(key).second)
            fail(ErrorKind::Validation, "edge '" + e.id + "' duplicates another edge between '" + e.n1 + "' and '" +
                                            e.n2 + "' on " + e.street_name);
        e.length = distance(a->position, b->position);
        m._incident[e.n1].push_back(e.id);
        m._incident[e.n2].push_back(e.id);
    }
    for (auto& [id, list] : m._incident)
        std::sort(list.begin(), list.end());

    for (auto& n : m._nodes)
    {
        n.degree = m.incident_edges(n.id).size();
        if (n.authored_type == IntersectionType::T && n.degree != 3)
            fail(ErrorKind::Validation, fmt::format("node '{}' is marked T but has {} incident edges", n.id, n.degree));
        if (n.authored_type == IntersectionType::FourWay && n.degree != 4)
            fail(ErrorKind::Validation,
                 fmt::format("node '{}' is marked 4-way but has {} incident edges", n.id, n.degree));
        n.type = spatial::classify_degree(n.degree, n.authored_type);
    }
}

void MapBuilder::check_connected(MapModel& m)
{
    if (m._nodes.empty())
        return;
    std::set<std::string> visited;
    std::size_t components = 0;
    for (const auto& start : m._nodes)
    {
        if (visited.count(start.id))
            continue;
        ++components;
        std::queue<std::string> q;
        q.push(start.id);
        visited.insert(start.id);
        while (!q.empty())
        {
            const auto cur = q.front();
            q.pop();
            for (const auto& eid : m.incident_edges(cur))
            {
                const auto& other = m.opposite(m.edge(eid), cur).id;
                if (visited.insert(other).second)
                    q.push(other);
            }
        }
    }
    if (components > 1)
        m._warnings.push_back(fmt::format("road graph is not connected ({} components)", components));
}

MapModel MapBuilder::build(const json& doc)
{
    const std::string root;
    if (!doc.is_object())
        schema_error("/", "expected a JSON object");
    const auto& version = require(doc, "version", root);
    if (!version.is_number_integer() || version.get<int>() != kMapDocumentVersion)
        schema_error("/version", fmt::format("unsupported map document version (expected {})", kMapDocumentVersion));

    MapModel m;
    m._frame = parse_frame(require(doc, "frame", root), "/frame");
    m._area_description = string_or(doc, "area_description", root);

    const auto& nodes = as_array(require(doc, "nodes", root), "/nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i)
        m._nodes.push_back(parse_node(nodes[i], child("/nodes", i)));
    const auto& edges = as_array(require(doc, "edges", root), "/edges");
    for (std::size_t i = 0; i < edges.size(); ++i)
        m._edges.push_back(parse_edge(edges[i], child("/edges", i)));

    std::vector<std::optional<EdgeRef>> authored;
    const auto& pois = as_array(require(doc, "pois", root), "/pois");
    for (std::size_t i = 0; i < pois.size(); ++i)
    {
        std::optional<EdgeRef> ref;
        m._pois.push_back(parse_poi(pois[i], child("/pois", i), ref));
        authored.push_back(ref);
    }
    // Keep each authored edge reference attached to its POI through the id sort.
    std::map<std::string, std::optional<EdgeRef>> authored_by_id;
    for (std::size_t i = 0; i < m._pois.size(); ++i)
        authored_by_id[m._pois[i].id] = authored[i];

    index(m);
    derive(m);
    check_connected(m);

    if (!m._pois.empty() && m._edges.empty())
        fail(ErrorKind::Validation, "POIs require at least one edge to attach to");

    constexpr double kTolerance = 0.01; // meters
    for (auto& p : m._pois)
    {
        const auto best = spatial::closest_edge(p.position, m);
        p.closest_edge = {best.edge_id, best.dist_from_n1_m};
        const auto& ref = authored_by_id[p.id];
        if (!ref)
            continue;
        const Edge* e = m.find_edge(ref->edge_id);
        if (!e)
            fail(ErrorKind::Validation, "POI '" + p.id + "' references missing edge '" + ref->edge_id + "'");
        const auto own = spatial::project_onto_edge(p.position, *e, m);
        if (own.distance_m > best.distance_m + kTolerance || std::abs(own.dist_from_n1_m - ref->offset_m) > kTolerance)
            fail(ErrorKind::Validation,
                 fmt::format("POI '{}' closest_edge {} @ {:.3f} m disagrees with geometry ({} @ {:.3f} m)", p.id,
                             ref->edge_id, ref->offset_m, best.edge_id, best.dist_from_n1_m));
        p.closest_edge = {e->id, own.dist_from_n1_m};
    }
    return m;
}

namespace {

std::string explanation_marker()
{
    return "\n" + std::string(kStructureExplanationHeader);
}

} // namespace

MapModel load_map(std::string_view text)
{
    std::string_view body = text;
    const auto marker = explanation_marker();
    if (auto pos = text.rfind(marker); pos != std::string_view::npos)
        body = text.substr(0, pos);
    json doc;
    try
    {
        doc = json::parse(body.begin(), body.end());
    }
    catch (const json::parse_error& e)
    {
        fail(ErrorKind::Validation, std::string("map document is not valid JSON: ") + e.what());
    }
    return MapBuilder::build(doc);
}

MapModel load_map(std::istream& source)
{
    std::string text{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
    return load_map(std::string_view(text));
}

MapModel load_map_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::NotFound, "cannot open map file '" + path + "'");
    return load_map(in);
}

// ---------------------------------------------------------------------------------------
// serialization

namespace {

json hours_json(const OpeningHours& h)
{
    json out = json::object();
    for (std::size_t d = 0; d < h.days.size(); ++d)
    {
        if (h.days[d].empty())
            continue;
        json list = json::array();
        for (const auto& iv : h.days[d])
            list.push_back(json::array({format_clock(iv.start), format_clock(iv.end)}));
        out[std::string(weekday_key(static_cast<Weekday>(d)))] = list;
    }
    return out;
}

json document(const MapModel& m)
{
    const auto& f = m.frame();
    json frame = {
        {"map_name", f.map_name},
        {"corners", json::array()},
        {"width_m", f.width_m},
        {"height_m", f.height_m},
        {"scale_text", f.scale_text},
        {"surroundings",
         {{"north", f.surroundings.north},
          {"east", f.surroundings.east},
          {"south", f.surroundings.south},
          {"west", f.surroundings.west}}},
    };
    for (const auto& c : f.corners)
        frame["corners"].push_back(json::array({c.lat, c.lon}));

    json nodes = json::array();
    for (const auto& n : m.nodes())
    {
        json j = {{"id", n.id}, {"position", point_json(n.position)}, {"label", n.label}, {"crossings", json::array()}};
        if (n.authored_type)
            j["intersection_type"] = to_string(*n.authored_type);
        for (const auto& c : n.crossings)
            j["crossings"].push_back({{"street", c.street},
                                      {"crosswalk", c.crosswalk},
                                      {"traffic_light", c.traffic_light},
                                      {"audio_signal", c.audio_signal}});
        nodes.push_back(std::move(j));
    }

    json edges = json::array();
    for (const auto& e : m.edges())
    {
        json j = {{"id", e.id},
                  {"endpoints", json::array({e.n1, e.n2})},
                  {"street_name", e.street_name},
                  {"paving", e.paving},
                  {"accessibility", e.accessibility}};
        if (e.slope)
            j["slope"] = *e.slope;
        if (e.one_way)
            j["one_way"] = *e.one_way == OneWay::Forward ? "forward" : "backward";
        edges.push_back(std::move(j));
    }

    json pois = json::array();
    for (const auto& p : m.pois())
    {
        pois.push_back({{"id", p.id},
                        {"name", p.name},
                        {"category", p.category},
                        {"position", point_json(p.position)},
                        {"address", p.address},
                        {"closest_edge", {{"edge", p.closest_edge.edge_id}, {"offset_m", p.closest_edge.offset_m}}},
                        {"opening_hours", hours_json(p.opening_hours)},
                        {"facilities", p.facilities},
                        {"accessibility", p.accessibility},
                        {"description", p.description},
                        {"discoverable", p.discoverable}});
    }

    return {{"version", kMapDocumentVersion}, {"frame", frame},          {"nodes", nodes},
            {"edges", edges},                 {"pois", pois},            {"area_description", m.area_description()}};
}

std::string slope_text(const Edge& e)
{
    const double pct = *e.slope * 100.0;
    if (std::abs(pct) < 0.05)
        return "flat";
    return fmt::format("{:.1f}% {} toward {}", std::abs(pct), pct > 0 ? "uphill" : "downhill", e.n2);
}

std::string crossing_text(const Crossing& c)
{
    std::vector<std::string> features;
    if (c.crosswalk)
        features.push_back("a crosswalk");
    if (c.traffic_light)
        features.push_back("a traffic light");
    if (c.audio_signal)
        features.push_back("an audio signal");
    if (features.empty())
        return "crossing " + c.street + " has no crosswalk";
    return "crossing " + c.street + " has " + join_and(features);
}

} // namespace

std::string format_meters(double meters)
{
    const double r = std::round(meters * 10.0) / 10.0;
    if (std::abs(r - std::round(r)) < 1e-9)
        return fmt::format("{:.0f} m", std::round(r) == 0.0 ? 0.0 : r);
    return fmt::format("{:.1f} m", r);
}

std::string serialize_map_document(const MapModel& model)
{
    return document(model).dump(2) + "\n";
}

std::string serialize_graph_structured(const MapModel& model)
{
    std::string out = serialize_map_document(model);
    out += "\n";
    out += kStructureExplanationHeader;
    out += "\n";
    out += "\"frame\" gives the map name, the latitude/longitude of the north-west, north-east, south-east and "
           "south-west corners, the size of the local reference system in meters (x grows east, y grows north), "
           "the printed scale and what lies beyond each side of the map. \"nodes\" are street intersections with "
           "their local position [x, y] in meters, an optional intersection type and the crossings available "
           "there. \"edges\" are street segments joining two nodes, with street name, paving, slope, traffic "
           "direction and accessibility notes; an edge is as long as the straight distance between its nodes. "
           "\"pois\" are points of interest with position, address, closest edge (offset measured from the first "
           "node of that edge), weekly opening hours, facilities and accessibility information.\n";
    return out;
}

std::string serialize_graph_text(const MapModel& model, const GraphTextOptions& options)
{
    std::string out;
    out += fmt::format("Road graph of {}. Nodes are street intersections and edges are street segments between "
                       "them. Positions are in meters in the local reference system (x grows east, y grows "
                       "north).\n\n",
                       model.frame().map_name.empty() ? std::string("the map") : model.frame().map_name);
    out += "Intersections:\n";
    for (const auto& n : model.nodes())
    {
        const bool dead_end = n.degree == 1 && n.label.empty();
        out += fmt::format("Node {} at ({}, {}) is {} {}", n.id, format_meters(n.position.x),
                           format_meters(n.position.y), dead_end ? "the end of" : "the intersection of",
                           model.intersection_name(n.id));
        if (options.intersection_types)
            out += dead_end ? std::string("; it is a dead end") : fmt::format("; it is {}", describe(n.type));
        out += ".";
        if (!n.crossings.empty())
        {
            std::vector<std::string> cs;
            for (const auto& c : n.crossings)
                cs.push_back(crossing_text(c));
            out += " Here " + join(cs, "; ") + ".";
        }
        out += "\n";
    }
    out += "\nStreet segments:\n";
    for (const auto& e : model.edges())
    {
        out += fmt::format("The edge {} - {} ({}) is part of {}, between {} and {}, and is {} long.", e.n1, e.n2, e.id,
                           e.street_name, model.cross_street(e.n1, e.street_name),
                           model.cross_street(e.n2, e.street_name), format_meters(e.length));
        if (!e.paving.empty())
            out += " Paving: " + e.paving + ".";
        if (e.slope)
            out += " Slope: " + slope_text(e) + ".";
        if (e.one_way)
            out += fmt::format(" One-way traffic from {} to {}.", *e.one_way == OneWay::Forward ? e.n1 : e.n2,
                               *e.one_way == OneWay::Forward ? e.n2 : e.n1);
        if (!e.accessibility.empty())
            out += " Accessibility: " + join(e.accessibility, "; ") + ".";
        out += "\n";
    }
    return out;
}

PoiPositionFormats poi_position_formats(const Poi& poi, const MapModel& model)
{
    PoiPositionFormats f;
    f.local = poi.position;
    f.address = poi.address;
    const auto& e = model.edge(poi.closest_edge.edge_id);
    const double from_n1 = poi.closest_edge.offset_m;
    const double from_n2 = std::max(0.0, e.length - from_n1);
    f.edge_ref = fmt::format("on edge {} - {} of {}, between {} and {}, {} from {} and {} from {}", e.n1, e.n2,
                             e.street_name, model.cross_street(e.n1, e.street_name),
                             model.cross_street(e.n2, e.street_name), format_meters(from_n1),
                             model.cross_street(e.n1, e.street_name), format_meters(from_n2),
                             model.cross_street(e.n2, e.street_name));
    return f;
}

} // namespace mapio
