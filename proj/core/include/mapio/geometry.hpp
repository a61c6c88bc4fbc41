// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

namespace mapio {

/// A point (or vector) in the local metric map frame: +x east, +y north, meters.
struct Point2D
{
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point2D operator+(Point2D a, Point2D b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point2D operator-(Point2D a, Point2D b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point2D operator*(Point2D a, double k) { return {a.x * k, a.y * k}; }
    friend constexpr Point2D operator*(double k, Point2D a) { return {a.x * k, a.y * k}; }
    friend constexpr bool operator==(Point2D, Point2D) = default;
};

constexpr double dot(Point2D a, Point2D b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2D a, Point2D b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2D v) { return std::hypot(v.x, v.y); }
inline double distance(Point2D a, Point2D b) { return norm(b - a); }
inline bool is_finite(Point2D p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Closest point of segment [a, b] to p, as the clamped parameter t in [0, 1].
struct SegmentProjection
{
    double t = 0.0;
    Point2D point;
    double distance = 0.0;
};

inline SegmentProjection project_onto_segment(Point2D p, Point2D a, Point2D b)
{
    const Point2D ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    if (t < 0.0)
        t = 0.0;
    else if (t > 1.0)
        t = 1.0;
    const Point2D q = a + ab * t;
    return {t, q, distance(p, q)};
}

/// Axis-aligned map bounds, [0, width] x [0, height].
struct Bounds
{
    double width = 0.0;
    double height = 0.0;

    bool contains(Point2D p) const { return p.x >= 0.0 && p.y >= 0.0 && p.x <= width && p.y <= height; }
};

} // namespace mapio
