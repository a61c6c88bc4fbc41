// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mapio/geometry.hpp"
#include "mapio/map_model.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

/// Deterministic spatial functions over an immutable MapModel. These back the chat
/// backend's tool calls and the guidance state machines.
namespace mapio::spatial {

inline constexpr double kDefaultWalkingSpeed = 1.2; // m/s

struct EdgeProjection
{
    std::string edge_id;
    std::string street_name;
    Point2D point;
    double dist_from_n1_m = 0.0;
    double dist_from_n2_m = 0.0;
    double distance_m = 0.0; // from the query point to `point`
};

double distance(Point2D p, Point2D q);
double distance(Point2D p, const Poi& poi);

/// Closed boundary: a point exactly `threshold_m` away is near.
bool is_near(Point2D p, const Poi& poi, double threshold_m);

struct PoiDistance
{
    const Poi* poi = nullptr;
    double distance_m = 0.0;
};

/// POIs within `radius_m`, ascending distance, ties by id.
std::vector<PoiDistance> pois_near(Point2D p, double radius_m, const MapModel& model);

/// Minimal-distance projection over all edges; ties go to the smaller edge id.
EdgeProjection closest_edge(Point2D p, const MapModel& model);
/// Projection onto one given edge.
EdgeProjection project_onto_edge(Point2D p, const Edge& edge, const MapModel& model);

/// Degree 3 is T, degree 4 is 4-way, anything else Other, unless the node carries an
/// authored type.
IntersectionType intersection_type(const Node& node, const MapModel& model);
IntersectionType classify_degree(std::size_t degree, std::optional<IntersectionType> authored = std::nullopt);

struct NodeRef
{
    std::string id;
};

struct PoiRef
{
    std::string id;
};

using Endpoint = std::variant<Point2D, NodeRef, PoiRef>;

struct RouteWaypoint
{
    std::optional<std::string> node_id; // unset for projection points off the node set
    Point2D position;
};

struct RouteLeg
{
    std::string edge_id;
    std::string street_name;
    std::size_t from = 0; // waypoint indices
    std::size_t to = 0;
    double length_m = 0.0;
    int blocks = 1;
};

struct Route
{
    std::vector<RouteWaypoint> waypoints;
    std::vector<RouteLeg> legs;
    double total_length_m = 0.0;

    bool empty() const { return legs.empty(); }
    int block_count() const;
};

struct RouteOptions
{
    /// Pedestrian routes ignore one-way restrictions.
    bool walking = true;
};

/// Where an endpoint attaches to the graph.
EdgeProjection attach(const Endpoint& endpoint, const MapModel& model);
Point2D position_of(const Endpoint& endpoint, const MapModel& model);

/// Minimal-length path over the graph augmented with both endpoint projections. Equal
/// lengths are broken by the lexicographically smaller node sequence.
Route shortest_route(const Endpoint& from, const Endpoint& to, const MapModel& model,
                     const RouteOptions& options = {});

enum class Cardinal { N, NE, E, SE, S, SW, W, NW };

/// 8 sectors centred on the compass axes, each (45k - 22.5, 45k + 22.5] degrees: a bearing on a
/// boundary belongs to the sector counterclockwise of it. Throws Degenerate for the zero vector.
Cardinal cardinal_of(Point2D v);
std::string_view cardinal_name(Cardinal c);   // "north-east"
std::string_view cardinal_symbol(Cardinal c); // "NE"
double cardinal_bearing(Cardinal c);          // degrees clockwise from north

enum class Verbosity { Concise, Accessible };

struct Instruction
{
    Cardinal heading = Cardinal::N;
    std::string street_name;
    int blocks = 0;
    double length_m = 0.0;
    std::size_t first_leg = 0;
    std::size_t leg_count = 0;
    std::size_t end_waypoint = 0;
    std::vector<std::string> notes; // accessibility notes, Accessible verbosity only
    std::string text;
};

/// One instruction per maximal same-street run of legs.
std::vector<Instruction> route_instructions(const Route& route, const MapModel& model,
                                            Verbosity verbosity = Verbosity::Concise);

double walking_time_s(double length_m, double speed_mps = kDefaultWalkingSpeed);
/// "4 minutes", "1 minute", "45 seconds"
std::string format_duration(double seconds);

/// Machine-readable definitions (name, description, JSON-schema parameters) of the
/// spatial tool calls.
nlohmann::json tool_catalog();

} // namespace mapio::spatial
