// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mapio/geometry.hpp"
#include "mapio/time.hpp"

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mapio {

inline constexpr int kMapDocumentVersion = 1;

enum class IntersectionType { T, FourWay, Other };

std::string_view to_string(IntersectionType t);          // "T", "4-way", "other"
std::string_view describe(IntersectionType t);           // "a T intersection", ...
IntersectionType parse_intersection_type(std::string_view text);

struct GeoCoord
{
    double lat = 0.0;
    double lon = 0.0;

    friend bool operator==(const GeoCoord&, const GeoCoord&) = default;
};

struct Surroundings
{
    std::string north;
    std::string east;
    std::string south;
    std::string west;

    friend bool operator==(const Surroundings&, const Surroundings&) = default;
};

/// Local metric frame of the printed map. Corners are ordered north-west, north-east,
/// south-east, south-west and are metadata only.
struct ReferenceFrame
{
    std::string map_name;
    std::array<GeoCoord, 4> corners{};
    double width_m = 0.0;
    double height_m = 0.0;
    std::string scale_text;
    Surroundings surroundings;

    Bounds bounds() const { return {width_m, height_m}; }
    /// Bilinear interpolation of the corner coordinates.
    GeoCoord to_geo(Point2D p) const;

    friend bool operator==(const ReferenceFrame&, const ReferenceFrame&) = default;
};

struct Crossing
{
    std::string street;
    bool crosswalk = false;
    bool traffic_light = false;
    bool audio_signal = false;

    friend bool operator==(const Crossing&, const Crossing&) = default;
};

struct Node
{
    std::string id;
    Point2D position;
    std::string label;
    std::optional<IntersectionType> authored_type;
    std::vector<Crossing> crossings;

    // derived at load
    std::size_t degree = 0;
    IntersectionType type = IntersectionType::Other;

    friend bool operator==(const Node&, const Node&) = default;
};

/// Forward means traffic flows from the first endpoint to the second.
enum class OneWay { Forward, Backward };

struct Edge
{
    std::string id;
    std::string n1;
    std::string n2;
    std::string street_name;
    std::string paving;
    std::optional<double> slope; // signed grade, positive rising from n1 to n2
    std::optional<OneWay> one_way;
    std::vector<std::string> accessibility;

    // derived at load
    double length = 0.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

struct EdgeRef
{
    std::string edge_id;
    double offset_m = 0.0; // from the edge's n1

    friend bool operator==(const EdgeRef&, const EdgeRef&) = default;
};

struct Poi
{
    std::string id;
    std::string name;
    std::string category;
    Point2D position;
    std::string address;
    EdgeRef closest_edge; // recomputed at load, authored value validated
    OpeningHours opening_hours;
    std::vector<std::string> facilities;
    std::vector<std::string> accessibility;
    std::string description;
    bool discoverable = false;

    friend bool operator==(const Poi&, const Poi&) = default;
};

/// Annotated road graph plus points of interest. Immutable once loaded; elements are
/// kept sorted by id.
class MapModel
{
public:
    MapModel() = default;

    const ReferenceFrame& frame() const { return _frame; }
    const std::vector<Node>& nodes() const { return _nodes; }
    const std::vector<Edge>& edges() const { return _edges; }
    const std::vector<Poi>& pois() const { return _pois; }
    const std::string& area_description() const { return _area_description; }
    /// Non-fatal findings from validation, e.g. a disconnected graph.
    const std::vector<std::string>& warnings() const { return _warnings; }

    const Node* find_node(std::string_view id) const;
    const Edge* find_edge(std::string_view id) const;
    const Poi* find_poi(std::string_view id) const;
    /// Case-insensitive exact name match.
    const Poi* find_poi_by_name(std::string_view name) const;

    const Node& node(std::string_view id) const;
    const Edge& edge(std::string_view id) const;
    const Poi& poi(std::string_view id) const;

    /// Edges touching the node, sorted by edge id.
    const std::vector<std::string>& incident_edges(std::string_view node_id) const;
    /// The other endpoint of `edge` seen from `node_id`.
    const Node& opposite(const Edge& edge, std::string_view node_id) const;
    /// Distinct street names meeting at the node, sorted, optionally excluding one.
    std::vector<std::string> streets_at(std::string_view node_id, std::string_view except = {}) const;
    /// "West 38th Street and 5th Avenue" style name, or the authored label.
    std::string intersection_name(std::string_view node_id) const;
    /// How the node reads from `street`: the other streets meeting there, the authored
    /// label, or "the end of <street>".
    std::string cross_street(std::string_view node_id, std::string_view street) const;

    friend bool operator==(const MapModel& a, const MapModel& b);

private:
    friend class MapBuilder;

    ReferenceFrame _frame;
    std::vector<Node> _nodes;
    std::vector<Edge> _edges;
    std::vector<Poi> _pois;
    std::string _area_description;
    std::vector<std::string> _warnings;

    std::map<std::string, std::size_t, std::less<>> _node_index;
    std::map<std::string, std::size_t, std::less<>> _edge_index;
    std::map<std::string, std::size_t, std::less<>> _poi_index;
    std::map<std::string, std::vector<std::string>, std::less<>> _incident;
};

/// Parses and validates a map document. Trailing content after the JSON value is
/// accepted only when it is the structure explanation written by
/// serialize_graph_structured.
MapModel load_map(std::istream& source);
MapModel load_map(std::string_view text);
MapModel load_map_file(const std::string& path);

/// The canonical map document (pretty JSON).
std::string serialize_map_document(const MapModel& model);

struct GraphTextOptions
{
    bool intersection_types = true;
};

/// Prose listing of nodes and edges, each element followed by its description.
std::string serialize_graph_text(const MapModel& model, const GraphTextOptions& options = {});

/// Map document followed by a short explanation of its structure.
std::string serialize_graph_structured(const MapModel& model);

inline constexpr std::string_view kStructureExplanationHeader = "Structure of the map document above:";

struct PoiPositionFormats
{
    Point2D local;
    std::string address;
    std::string edge_ref;
};

/// Three redundant renderings of a POI position.
PoiPositionFormats poi_position_formats(const Poi& poi, const MapModel& model);

/// "310 m", "12.5 m"
std::string format_meters(double meters);

} // namespace mapio
