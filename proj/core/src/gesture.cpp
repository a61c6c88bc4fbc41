// SPDX-License-Identifier: Apache-2.0
#include "mapio/error.hpp"
#include "mapio/pointer.hpp"
#include "text_util.hpp"

#include <cmath>
#include <numbers>

namespace mapio::pointer {

std::string_view to_string(Hand h)
{
    return h == Hand::Left ? "left" : "right";
}

Hand parse_hand(std::string_view text)
{
    const auto key = detail::lower(text);
    if (key == "left")
        return Hand::Left;
    if (key == "right")
        return Hand::Right;
    fail(ErrorKind::Validation, "unknown hand '" + std::string(text) + "'");
}

HandLandmarks HandLandmarks::from_points(Hand hand, std::span<const Point2D> points)
{
    if (points.size() != kLandmarkCount)
        fail(ErrorKind::Validation,
             "expected " + std::to_string(kLandmarkCount) + " landmarks, got " + std::to_string(points.size()));
    HandLandmarks out;
    out.hand = hand;
    for (std::size_t i = 0; i < kLandmarkCount; ++i)
    {
        if (!is_finite(points[i]))
            fail(ErrorKind::Validation, "landmark " + std::to_string(i) + " is not finite");
        out.points[i] = points[i];
    }
    return out;
}

HandLandmarks HandLandmarks::from_mediapipe(Hand hand, std::span<const Point2D> points)
{
    if (points.size() != kLandmarkCount + 1)
        fail(ErrorKind::Validation, "expected 21 tracker landmarks, got " + std::to_string(points.size()));
    // tracker order: wrist, thumb 1-4, index 5-8, middle 9-12, ring 13-16, pinky 17-20
    std::array<Point2D, kLandmarkCount> regrouped{};
    std::size_t k = 0;
    for (std::size_t first : {5u, 9u, 13u, 17u, 1u})
    {
        for (std::size_t i = 0; i < kLandmarksPerFinger; ++i)
            regrouped[k++] = points[first + i];
    }
    return from_points(hand, regrouped);
}

bool is_collinear(std::span<const Point2D> chain, double tolerance_deg)
{
    if (chain.size() < 3)
        return chain.size() == 2 && chain[0] != chain[1];
    const double cos_tol = std::cos(tolerance_deg * std::numbers::pi / 180.0);
    for (std::size_t i = 0; i + 2 < chain.size(); ++i)
    {
        const Point2D a = chain[i + 1] - chain[i];
        const Point2D b = chain[i + 2] - chain[i + 1];
        const double na = norm(a);
        const double nb = norm(b);
        if (na == 0.0 || nb == 0.0)
            return false;
        if (dot(a, b) / (na * nb) < cos_tol)
            return false;
    }
    return true;
}

bool detect_pointing(const HandLandmarks& hand, const GestureConfig& config)
{
    const double tol = config.collinearity_tolerance_deg;
    if (!is_collinear(hand.finger(Finger::Index), tol))
        return false;
    for (Finger f : {Finger::Middle, Finger::Ring, Finger::Little})
    {
        if (is_collinear(hand.finger(f), tol))
            return false;
    }
    return true;
}

bool detect_pointing(Hand hand, std::span<const Point2D> landmarks, const GestureConfig& config)
{
    return detect_pointing(HandLandmarks::from_points(hand, landmarks), config);
}

} // namespace mapio::pointer
