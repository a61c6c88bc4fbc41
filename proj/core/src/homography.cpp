// SPDX-License-Identifier: Apache-2.0
#include "mapio/error.hpp"
#include "mapio/pointer.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace mapio::pointer {

namespace {

constexpr double kTiny = 1e-12;

Eigen::Matrix3d to_eigen(const std::array<double, 9>& m)
{
    Eigen::Matrix3d out;
    out << m[0], m[1], m[2], m[3], m[4], m[5], m[6], m[7], m[8];
    return out;
}

std::array<double, 9> from_eigen(const Eigen::Matrix3d& m)
{
    return {m(0, 0), m(0, 1), m(0, 2), m(1, 0), m(1, 1), m(1, 2), m(2, 0), m(2, 1), m(2, 2)};
}

/// Similarity moving the centroid to the origin with mean distance sqrt(2).
Eigen::Matrix3d normalizer(std::span<const Point2D> pts)
{
    double cx = 0.0;
    double cy = 0.0;
    for (const auto& p : pts)
    {
        cx += p.x;
        cy += p.y;
    }
    cx /= static_cast<double>(pts.size());
    cy /= static_cast<double>(pts.size());
    double mean = 0.0;
    for (const auto& p : pts)
        mean += std::hypot(p.x - cx, p.y - cy);
    mean /= static_cast<double>(pts.size());
    if (mean < kTiny)
        fail(ErrorKind::Degenerate, "homography: all points coincide");
    const double s = std::numbers::sqrt2 / mean;
    Eigen::Matrix3d t;
    t << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
    return t;
}

bool three_collinear(Point2D a, Point2D b, Point2D c)
{
    const double area = std::abs(cross(b - a, c - a));
    const double scale = std::max({norm(b - a), norm(c - a), norm(c - b)});
    return area <= 1e-9 * scale * scale;
}

} // namespace

Homography Homography::from_matrix(const std::array<double, 9>& rowMajor)
{
    if (std::abs(rowMajor[8]) < kTiny)
        fail(ErrorKind::Degenerate, "homography: h22 is zero, cannot normalise");
    Homography h;
    for (std::size_t i = 0; i < 9; ++i)
        h._m[i] = rowMajor[i] / rowMajor[8];
    if (std::abs(h.determinant()) < kTiny)
        fail(ErrorKind::Degenerate, "homography: singular matrix");
    return h;
}

Homography Homography::translation(double dx, double dy)
{
    return from_matrix({1, 0, dx, 0, 1, dy, 0, 0, 1});
}

double Homography::determinant() const
{
    return to_eigen(_m).determinant();
}

Homography Homography::inverse() const
{
    return from_matrix(from_eigen(to_eigen(_m).inverse()));
}

Point2D Homography::apply(Point2D p) const
{
    const double w = _m[6] * p.x + _m[7] * p.y + _m[8];
    if (std::abs(w) < kTiny)
        fail(ErrorKind::Degenerate, "homography: point maps to infinity");
    return {(_m[0] * p.x + _m[1] * p.y + _m[2]) / w, (_m[3] * p.x + _m[4] * p.y + _m[5]) / w};
}

Point2D to_map_coords(const Homography& h, Point2D frame_point)
{
    return h.apply(frame_point);
}

Homography estimate_homography(std::span<const Correspondence> correspondences)
{
    const std::size_t n = correspondences.size();
    if (n < 4)
        fail(ErrorKind::Degenerate, "homography: need at least 4 correspondences, got " + std::to_string(n));

    std::vector<Point2D> src;
    std::vector<Point2D> dst;
    for (const auto& c : correspondences)
    {
        if (!is_finite(c.frame) || !is_finite(c.map))
            fail(ErrorKind::Validation, "homography: non-finite correspondence");
        src.push_back(c.frame);
        dst.push_back(c.map);
    }
    if (n == 4)
    {
        for (std::size_t i = 0; i < 4; ++i)
        {
            for (std::size_t j = i + 1; j < 4; ++j)
            {
                for (std::size_t k = j + 1; k < 4; ++k)
                {
                    if (three_collinear(src[i], src[j], src[k]) || three_collinear(dst[i], dst[j], dst[k]))
                        fail(ErrorKind::Degenerate, "homography: three of the four points are collinear");
                }
            }
        }
    }

    const Eigen::Matrix3d ts = normalizer(src);
    const Eigen::Matrix3d td = normalizer(dst);

    Eigen::MatrixXd a(2 * n, 9);
    for (std::size_t i = 0; i < n; ++i)
    {
        const Eigen::Vector3d p = ts * Eigen::Vector3d(src[i].x, src[i].y, 1.0);
        const Eigen::Vector3d q = td * Eigen::Vector3d(dst[i].x, dst[i].y, 1.0);
        const double x = p.x();
        const double y = p.y();
        const double u = q.x();
        const double v = q.y();
        const auto r = static_cast<Eigen::Index>(2 * i);
        a.row(r) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
        a.row(r + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
    }

    // The null vector of A (smallest right singular vector) is the normalised homography.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv.size() < 8 || sv(7) <= 1e-10 * sv(0))
        fail(ErrorKind::Degenerate, "homography: correspondences do not determine a unique transform");
    const Eigen::VectorXd h = svd.matrixV().col(8);

    Eigen::Matrix3d hn;
    hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
    const Eigen::Matrix3d full = td.inverse() * hn * ts;
    return Homography::from_matrix(from_eigen(full));
}

} // namespace mapio::pointer
