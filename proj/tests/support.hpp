// SPDX-License-Identifier: Apache-2.0
#pragma once

// Shared by the unit tests and the acceptance binary. The oracles here deliberately avoid
// the library's own geometry helpers.

#include "mapio/map_model.hpp"
#include "mapio/pointer.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace mapio::fx {

inline std::string fixture(const std::string& rel)
{
    return std::string(MAPIO_FIXTURES_DIR) + "/" + rel;
}

inline std::string golden_path(const std::string& name)
{
    return std::string(MAPIO_GOLDEN_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline bool update_goldens()
{
    const char* v = std::getenv("MAPIO_UPDATE_GOLDEN");
    return v && std::string(v) == "1";
}

/// Compares against tests/golden/<name>. MAPIO_UPDATE_GOLDEN=1 rewrites the file instead.
inline bool matches_golden(const std::string& name, const std::string& actual)
{
    const auto path = golden_path(name);
    if (update_goldens())
    {
        std::filesystem::create_directories(std::filesystem::path(path).parent_path());
        std::ofstream(path, std::ios::binary) << actual;
        return true;
    }
    if (!std::filesystem::exists(path))
        return false;
    return read_file(path) == actual;
}

inline double dist(double ax, double ay, double bx, double by)
{
    return std::sqrt((ax - bx) * (ax - bx) + (ay - by) * (ay - by));
}

/// Random connected street graph: a random spanning tree plus extra chords.
inline nlohmann::json random_connected_map(unsigned seed, int node_count)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> coord(0.0, 1000.0);
    nlohmann::json nodes = nlohmann::json::array();
    std::vector<std::pair<double, double>> pos;
    for (int i = 0; i < node_count; ++i)
    {
        // keep nodes apart so no edge is degenerate
        double x = 0, y = 0;
        bool ok = false;
        while (!ok)
        {
            x = coord(rng);
            y = coord(rng);
            ok = std::all_of(pos.begin(), pos.end(), [&](auto& p) { return dist(x, y, p.first, p.second) > 5.0; });
        }
        pos.emplace_back(x, y);
        nodes.push_back({{"id", "v" + std::to_string(i)}, {"position", {x, y}}});
    }
    std::set<std::pair<int, int>> used;
    nlohmann::json edges = nlohmann::json::array();
    auto add = [&](int a, int b) {
        if (a == b || !used.insert({std::min(a, b), std::max(a, b)}).second)
            return;
        const auto id = "e" + std::to_string(edges.size() + 10);
        edges.push_back({{"id", id},
                         {"endpoints", {"v" + std::to_string(a), "v" + std::to_string(b)}},
                         {"street_name", "Street " + std::to_string(edges.size() + 1)}});
    };
    for (int i = 1; i < node_count; ++i)
        add(i, std::uniform_int_distribution<int>(0, i - 1)(rng));
    const int extra = std::uniform_int_distribution<int>(0, node_count)(rng);
    for (int k = 0; k < extra; ++k)
        add(std::uniform_int_distribution<int>(0, node_count - 1)(rng),
            std::uniform_int_distribution<int>(0, node_count - 1)(rng));

    return {{"version", 1},
            {"area_description", "random graph"},
            {"frame",
             {{"map_name", "Random"},
              {"corners", {{0.01, 0.0}, {0.01, 0.01}, {0.0, 0.01}, {0.0, 0.0}}},
              {"width_m", 1000},
              {"height_m", 1000},
              {"scale_text", "100m: 1cm"}}},
            {"nodes", nodes},
            {"edges", edges},
            {"pois", nlohmann::json::array()}};
}

/// Exhaustive enumeration of simple paths; edge lengths from the raw node positions.
inline double brute_force_shortest(const MapModel& model, const std::string& from, const std::string& to)
{
    std::map<std::string, std::vector<std::pair<std::string, double>>> adj;
    for (const auto& e : model.edges())
    {
        const auto& a = model.node(e.n1).position;
        const auto& b = model.node(e.n2).position;
        const double len = dist(a.x, a.y, b.x, b.y);
        adj[e.n1].emplace_back(e.n2, len);
        adj[e.n2].emplace_back(e.n1, len);
    }
    double best = std::numeric_limits<double>::infinity();
    std::set<std::string> visited{from};
    std::function<void(const std::string&, double)> walk = [&](const std::string& at, double acc) {
        if (at == to)
        {
            best = std::min(best, acc);
            return;
        }
        for (const auto& [next, len] : adj[at])
        {
            if (visited.count(next))
                continue;
            visited.insert(next);
            walk(next, acc + len);
            visited.erase(next);
        }
    };
    walk(from, 0.0);
    return best;
}

/// Minimum distance from p to any edge, sampling every edge at 1 cm.
inline double dense_edge_distance(const MapModel& model, Point2D p)
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : model.edges())
    {
        const auto& a = model.node(e.n1).position;
        const auto& b = model.node(e.n2).position;
        const double len = dist(a.x, a.y, b.x, b.y);
        const auto steps = static_cast<long>(std::ceil(len / 0.01));
        for (long i = 0; i <= steps; ++i)
        {
            const double t = static_cast<double>(i) / static_cast<double>(steps);
            const double x = a.x + (b.x - a.x) * t;
            const double y = a.y + (b.y - a.y) * t;
            const double d2 = (x - p.x) * (x - p.x) + (y - p.y) * (y - p.y);
            if (d2 < best)
                best = d2;
        }
    }
    return std::sqrt(best);
}

/// Closed-form point-segment distance, written independently of geometry.hpp.
inline double segment_distance(Point2D p, Point2D a, Point2D b)
{
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 == 0 ? 0 : ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return dist(p.x, p.y, a.x + t * vx, a.y + t * vy);
}

struct Candidate
{
    pointer::FeatureKind kind;
    std::string id;
    double distance;
};

/// Every node, edge and visible POI with its distance from p.
inline std::vector<Candidate> all_features(const MapModel& model, Point2D p)
{
    std::vector<Candidate> out;
    for (const auto& n : model.nodes())
        out.push_back({pointer::FeatureKind::Intersection, n.id, dist(p.x, p.y, n.position.x, n.position.y)});
    for (const auto& e : model.edges())
        out.push_back({pointer::FeatureKind::Street, e.id,
                       segment_distance(p, model.node(e.n1).position, model.node(e.n2).position)});
    for (const auto& poi : model.pois())
        if (poi.discoverable)
            out.push_back({pointer::FeatureKind::Poi, poi.id, dist(p.x, p.y, poi.position.x, poi.position.y)});
    return out;
}

/// Apply a row-major 3x3 homography with explicit w-division.
inline Point2D apply_h(const std::array<double, 9>& h, Point2D p)
{
    const double w = h[6] * p.x + h[7] * p.y + h[8];
    return {(h[0] * p.x + h[1] * p.y + h[2]) / w, (h[3] * p.x + h[4] * p.y + h[5]) / w};
}

/// Bearing in degrees clockwise from north of the vector (dx, dy), y pointing north.
inline double bearing_deg(double dx, double dy)
{
    double b = std::atan2(dx, dy) * 180.0 / 3.14159265358979323846;
    return b < 0 ? b + 360.0 : b;
}

inline double angle_between(double a, double b)
{
    const double d = std::fmod(std::abs(a - b), 360.0);
    return d > 180.0 ? 360.0 - d : d;
}

} // namespace mapio::fx
