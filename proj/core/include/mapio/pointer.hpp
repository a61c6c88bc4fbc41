// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mapio/geometry.hpp"
#include "mapio/map_model.hpp"
#include "mapio/time.hpp"

#include <array>
#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mapio::pointer {

enum class Hand { Left, Right };

std::string_view to_string(Hand h);
Hand parse_hand(std::string_view text);

inline constexpr std::size_t kLandmarkCount = 20;
inline constexpr std::size_t kLandmarksPerFinger = 4;

/// Landmark groups in storage order. Each group runs from the knuckle to the tip.
enum class Finger { Index, Middle, Ring, Little, Thumb };

/// 20 image-frame landmarks of one hand: index, middle, ring, little, then thumb.
struct HandLandmarks
{
    Hand hand = Hand::Right;
    std::array<Point2D, kLandmarkCount> points{};

    std::span<const Point2D, kLandmarksPerFinger> finger(Finger f) const
    {
        return std::span<const Point2D, kLandmarksPerFinger>(points.data() + static_cast<std::size_t>(f) * kLandmarksPerFinger,
                                                             kLandmarksPerFinger);
    }
    Point2D index_tip() const { return points[kLandmarksPerFinger - 1]; }

    /// Validates the count (20) and finiteness.
    static HandLandmarks from_points(Hand hand, std::span<const Point2D> points);
    /// Adapter for trackers emitting 21 points (wrist, thumb, index, middle, ring, pinky):
    /// drops the wrist and regroups.
    static HandLandmarks from_mediapipe(Hand hand, std::span<const Point2D> points);
};

struct GestureConfig
{
    double collinearity_tolerance_deg = 12.0;
};

/// True when every turn between consecutive segments of the chain stays within the
/// tolerance. Zero-length segments are never collinear.
bool is_collinear(std::span<const Point2D> chain, double tolerance_deg);

/// Index finger straight while middle, ring and little fingers are not. Thumb ignored.
bool detect_pointing(const HandLandmarks& hand, const GestureConfig& config = {});
bool detect_pointing(Hand hand, std::span<const Point2D> landmarks, const GestureConfig& config = {});

/// Projective frame-to-map transform, normalised so that h(2,2) == 1.
class Homography
{
public:
    Homography() = default; // identity

    /// Row-major entries; throws Degenerate when h(2,2) is ~0 or the matrix is singular.
    static Homography from_matrix(const std::array<double, 9>& rowMajor);
    static Homography translation(double dx, double dy);

    double operator()(int row, int col) const { return _m[static_cast<std::size_t>(row * 3 + col)]; }
    const std::array<double, 9>& matrix() const { return _m; }
    double determinant() const;
    Homography inverse() const;

    /// Projective application with w-division; throws Degenerate near infinity.
    Point2D apply(Point2D p) const;

private:
    std::array<double, 9> _m{1, 0, 0, 0, 1, 0, 0, 0, 1};
};

struct Correspondence
{
    Point2D frame;
    Point2D map;
};

/// Normalised direct linear transform over >= 4 correspondences.
Homography estimate_homography(std::span<const Correspondence> correspondences);
Point2D to_map_coords(const Homography& h, Point2D frame_point);

/// Running mean over the most recent `capacity` positions.
class SmoothingWindow
{
public:
    explicit SmoothingWindow(std::size_t capacity = 20);

    Point2D smooth(Point2D position);
    Point2D mean() const;
    void clear() { _buffer.clear(); }

    std::size_t capacity() const { return _capacity; }
    std::size_t size() const { return _buffer.size(); }
    bool empty() const { return _buffer.empty(); }
    const std::deque<Point2D>& samples() const { return _buffer; }
    /// Distance between the oldest and newest buffered sample.
    double displacement() const;

private:
    std::size_t _capacity;
    std::deque<Point2D> _buffer;
};

struct HandMotion
{
    Hand hand = Hand::Right;
    Point2D position;            // latest raw map position
    double displacement_m = 0.0; // over the smoothing window
};

/// Picks the hand to follow: off-map hands are dropped, then the one that moved more
/// over the window, ties resolved toward `previous` (then the right hand).
std::optional<Hand> arbitrate(std::span<const HandMotion> hands, const Bounds& bounds,
                              std::optional<Hand> previous);

enum class FeatureKind { None, Street, Intersection, Poi };

std::string_view to_string(FeatureKind k);

struct FeatureHit
{
    FeatureKind kind = FeatureKind::None;
    std::string id;
    Point2D snapped_point;
    double distance_m = 0.0;

    bool is_feature() const { return kind != FeatureKind::None; }
    bool same_feature(const FeatureHit& other) const { return kind == other.kind && id == other.id; }
    friend bool operator==(const FeatureHit&, const FeatureHit&) = default;
};

struct SnapState
{
    std::optional<FeatureHit> current;
    double capture_radius_m = 12.0;
    double release_radius_m = 20.0;
};

/// POIs made discoverable during a session, on top of the ones flagged in the map.
using DiscoveredPois = std::set<std::string, std::less<>>;

/// Distance from `pos` to a feature, or nullopt when the feature does not exist or is a
/// hidden POI.
std::optional<FeatureHit> measure_feature(Point2D pos, FeatureKind kind, std::string_view id, const MapModel& model,
                                          const DiscoveredPois& discovered = {});

/// Nearest feature within `radius_m`; exact distance ties go node, then edge, then POI,
/// then smaller id. Hidden POIs are skipped.
FeatureHit nearest_feature(Point2D pos, const MapModel& model, double radius_m, const DiscoveredPois& discovered = {});

/// Gravity snapping: a held feature is kept while within the release radius, otherwise
/// the nearest feature within the capture radius is acquired.
FeatureHit snap(Point2D pos, const MapModel& model, SnapState& state, const DiscoveredPois& discovered = {});

enum class FeedbackType { Enter, Leave, Dwell, AmbientOn, AmbientOff, BusyTick };

std::string_view to_string(FeedbackType t);

struct FeedbackEvent
{
    FeedbackType type = FeedbackType::Enter;
    Millis at{0};
    FeatureKind kind = FeatureKind::None;
    std::string id;
    std::string text;

    friend bool operator==(const FeedbackEvent&, const FeedbackEvent&) = default;
};

/// Spoken name of a feature.
std::string announcement(const FeatureHit& hit, const MapModel& model);
/// Accessibility details read after dwelling on a feature.
std::string accessibility_text(const FeatureHit& hit, const MapModel& model);

/// Turns a stream of hits into audio feedback events. `std::nullopt` means no pointing
/// hand was seen in that frame.
class FeedbackTracker
{
public:
    explicit FeedbackTracker(Millis dwell_threshold = Millis(1500));

    std::vector<FeedbackEvent> update(Millis now, const std::optional<FeatureHit>& hit, const MapModel& model);

    const std::optional<FeatureHit>& current() const { return _current; }
    bool ambient() const { return _ambient; }

private:
    Millis _dwell;
    std::optional<FeatureHit> _current;
    Millis _entered_at{0};
    bool _dwell_sent = false;
    bool _ambient = false;
};

struct TimedHit
{
    Millis at{0};
    std::optional<FeatureHit> hit;
};

std::vector<FeedbackEvent> feedback_events(std::span<const TimedHit> hits, const MapModel& model,
                                           Millis dwell_threshold = Millis(1500));

/// Periodic "still working" ticks while a conversation answer is pending.
class BusyTicker
{
public:
    explicit BusyTicker(Millis interval = Millis(7000)): _interval(interval) {}

    void start(Millis now);
    void stop() { _pending = false; }
    bool pending() const { return _pending; }

    /// Tick times in (last advance, now]; ticks fall at start + k * interval, k >= 1.
    std::vector<Millis> advance(Millis now);

private:
    Millis _interval;
    Millis _next{0};
    bool _pending = false;
};

struct TrackerConfig
{
    GestureConfig gesture;
    std::size_t window = 20;
    double capture_radius_m = 12.0;
    double release_radius_m = 20.0;
    Millis dwell_threshold{1500};
};

/// One hand seen in one frame, already converted to map coordinates.
struct HandFrame
{
    Hand hand = Hand::Right;
    Point2D map_position;
    bool pointing = true;
};

/// What the pointer designates at a given instant. Conversation turns capture one of
/// these and keep it for the whole turn.
struct PointerSnapshot
{
    Millis at{0};
    std::optional<Hand> hand;
    std::optional<Point2D> position; // smoothed, map frame
    FeatureHit hit;
};

/// Gesture, arbitration, smoothing, snapping and feedback for the live pointer.
class PointerTracker
{
public:
    PointerTracker(std::shared_ptr<const MapModel> model, TrackerConfig config = {});

    /// Ingests one camera frame worth of hands. Timestamps must increase.
    std::vector<FeedbackEvent> ingest(Millis now, std::span<const HandFrame> hands);

    /// Latest snapshot; safe to call from other threads.
    std::shared_ptr<const PointerSnapshot> snapshot() const;

    void set_discovered(DiscoveredPois discovered) { _discovered = std::move(discovered); }
    const TrackerConfig& config() const { return _config; }
    const MapModel& model() const { return *_model; }

private:
    std::shared_ptr<const MapModel> _model;
    TrackerConfig _config;
    std::map<Hand, SmoothingWindow> _windows;
    std::optional<Hand> _active;
    SnapState _snap;
    FeedbackTracker _feedback;
    DiscoveredPois _discovered;
    std::optional<Millis> _last;

    mutable std::mutex _snapshot_mutex;
    std::shared_ptr<const PointerSnapshot> _snapshot;
};

} // namespace mapio::pointer
