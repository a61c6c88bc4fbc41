// SPDX-License-Identifier: Apache-2.0
#include "mapio/pointer.hpp"

#include "mapio/error.hpp"
#include "mapio/spatial.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <cmath>
#include <tuple>

namespace mapio::pointer {

// ---------------------------------------------------------------------------------------
// smoothing and arbitration

SmoothingWindow::SmoothingWindow(std::size_t capacity): _capacity(capacity)
{
    if (capacity == 0)
        fail(ErrorKind::Validation, "smoothing window capacity must be positive");
}

Point2D SmoothingWindow::smooth(Point2D position)
{
    _buffer.push_back(position);
    while (_buffer.size() > _capacity)
        _buffer.pop_front();
    return mean();
}

Point2D SmoothingWindow::mean() const
{
    if (_buffer.empty())
        fail(ErrorKind::Runtime, "smoothing window is empty");
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& p : _buffer)
    {
        sx += p.x;
        sy += p.y;
    }
    const auto n = static_cast<double>(_buffer.size());
    return {sx / n, sy / n};
}

double SmoothingWindow::displacement() const
{
    if (_buffer.size() < 2)
        return 0.0;
    return distance(_buffer.front(), _buffer.back());
}

std::optional<Hand> arbitrate(std::span<const HandMotion> hands, const Bounds& bounds, std::optional<Hand> previous)
{
    constexpr double kTie = 1e-9;
    const HandMotion* best = nullptr;
    for (const auto& h : hands)
    {
        if (!bounds.contains(h.position))
            continue;
        if (!best)
        {
            best = &h;
            continue;
        }
        const double diff = h.displacement_m - best->displacement_m;
        if (diff > kTie)
            best = &h;
        else if (std::abs(diff) <= kTie)
        {
            if (previous == h.hand || (previous != best->hand && h.hand == Hand::Right))
                best = &h;
        }
    }
    if (!best)
        return std::nullopt;
    return best->hand;
}

// ---------------------------------------------------------------------------------------
// snapping

std::string_view to_string(FeatureKind k)
{
    switch (k)
    {
        case FeatureKind::None: return "none";
        case FeatureKind::Street: return "street";
        case FeatureKind::Intersection: return "intersection";
        case FeatureKind::Poi: return "poi";
    }
    return "none";
}

namespace {

int kind_rank(FeatureKind k)
{
    switch (k)
    {
        case FeatureKind::Intersection: return 0;
        case FeatureKind::Street: return 1;
        case FeatureKind::Poi: return 2;
        case FeatureKind::None: return 3;
    }
    return 3;
}

bool visible(const Poi& poi, const DiscoveredPois& discovered)
{
    return poi.discoverable || discovered.count(poi.id) > 0;
}

bool closer(const FeatureHit& a, const FeatureHit& b)
{
    return std::make_tuple(a.distance_m, kind_rank(a.kind), std::string_view(a.id)) <
           std::make_tuple(b.distance_m, kind_rank(b.kind), std::string_view(b.id));
}

} // namespace

std::optional<FeatureHit> measure_feature(Point2D pos, FeatureKind kind, std::string_view id, const MapModel& model,
                                          const DiscoveredPois& discovered)
{
    switch (kind)
    {
        case FeatureKind::Intersection:
            if (const auto* n = model.find_node(id))
                return FeatureHit{kind, n->id, n->position, distance(pos, n->position)};
            return std::nullopt;
        case FeatureKind::Street:
            if (const auto* e = model.find_edge(id))
            {
                const auto proj = spatial::project_onto_edge(pos, *e, model);
                return FeatureHit{kind, e->id, proj.point, proj.distance_m};
            }
            return std::nullopt;
        case FeatureKind::Poi:
            if (const auto* p = model.find_poi(id); p && visible(*p, discovered))
                return FeatureHit{kind, p->id, p->position, distance(pos, p->position)};
            return std::nullopt;
        case FeatureKind::None: return std::nullopt;
    }
    return std::nullopt;
}

FeatureHit nearest_feature(Point2D pos, const MapModel& model, double radius_m, const DiscoveredPois& discovered)
{
    std::optional<FeatureHit> best;
    auto consider = [&](FeatureHit cand) {
        if (cand.distance_m > radius_m)
            return;
        if (!best || closer(cand, *best))
            best = std::move(cand);
    };
    for (const auto& n : model.nodes())
        consider({FeatureKind::Intersection, n.id, n.position, distance(pos, n.position)});
    for (const auto& e : model.edges())
    {
        const auto proj = spatial::project_onto_edge(pos, e, model);
        consider({FeatureKind::Street, e.id, proj.point, proj.distance_m});
    }
    for (const auto& p : model.pois())
    {
        if (visible(p, discovered))
            consider({FeatureKind::Poi, p.id, p.position, distance(pos, p.position)});
    }
    if (!best)
        return FeatureHit{FeatureKind::None, {}, pos, 0.0};
    return *best;
}

FeatureHit snap(Point2D pos, const MapModel& model, SnapState& state, const DiscoveredPois& discovered)
{
    if (state.release_radius_m < state.capture_radius_m)
        fail(ErrorKind::Validation, "release radius must not be smaller than capture radius");
    if (state.current && state.current->is_feature())
    {
        auto held = measure_feature(pos, state.current->kind, state.current->id, model, discovered);
        if (held && held->distance_m <= state.release_radius_m)
        {
            state.current = held;
            return *held;
        }
    }
    auto hit = nearest_feature(pos, model, state.capture_radius_m, discovered);
    if (hit.is_feature())
        state.current = hit;
    else
        state.current.reset();
    return hit;
}

// ---------------------------------------------------------------------------------------
// feedback

std::string_view to_string(FeedbackType t)
{
    switch (t)
    {
        case FeedbackType::Enter: return "ENTER";
        case FeedbackType::Leave: return "LEAVE";
        case FeedbackType::Dwell: return "DWELL";
        case FeedbackType::AmbientOn: return "AMBIENT_ON";
        case FeedbackType::AmbientOff: return "AMBIENT_OFF";
        case FeedbackType::BusyTick: return "BUSY_TICK";
    }
    return "ENTER";
}

std::string announcement(const FeatureHit& hit, const MapModel& model)
{
    switch (hit.kind)
    {
        case FeatureKind::Intersection:
        {
            const auto& n = model.node(hit.id);
            if (!n.label.empty())
                return n.label;
            return "Intersection of " + model.intersection_name(n.id);
        }
        case FeatureKind::Street: return model.edge(hit.id).street_name;
        case FeatureKind::Poi: return model.poi(hit.id).name;
        case FeatureKind::None: return {};
    }
    return {};
}

std::string accessibility_text(const FeatureHit& hit, const MapModel& model)
{
    std::vector<std::string> parts;
    std::string subject;
    switch (hit.kind)
    {
        case FeatureKind::Intersection:
        {
            const auto& n = model.node(hit.id);
            subject = announcement(hit, model);
            parts.push_back(std::string(describe(n.type)));
            for (const auto& c : n.crossings)
            {
                std::vector<std::string> f;
                if (c.crosswalk)
                    f.push_back("crosswalk");
                if (c.traffic_light)
                    f.push_back("traffic light");
                if (c.audio_signal)
                    f.push_back("audio signal");
                parts.push_back("crossing " + c.street + ": " + (f.empty() ? std::string("no crosswalk") : detail::join(f, ", ")));
            }
            break;
        }
        case FeatureKind::Street:
        {
            const auto& e = model.edge(hit.id);
            subject = e.street_name;
            if (!e.paving.empty())
                parts.push_back("paving " + e.paving);
            if (e.slope && std::abs(*e.slope) >= 0.0005)
                parts.push_back(fmt::format("slope {:.1f}%", std::abs(*e.slope) * 100.0));
            if (e.one_way)
                parts.push_back("one-way traffic");
            for (const auto& a : e.accessibility)
                parts.push_back(a);
            break;
        }
        case FeatureKind::Poi:
        {
            const auto& p = model.poi(hit.id);
            subject = p.name;
            parts = p.accessibility;
            break;
        }
        case FeatureKind::None: return {};
    }
    if (parts.empty())
        return "No accessibility information for " + subject + ".";
    return subject + ": " + detail::join(parts, "; ") + ".";
}

FeedbackTracker::FeedbackTracker(Millis dwell_threshold): _dwell(dwell_threshold) {}

std::vector<FeedbackEvent> FeedbackTracker::update(Millis now, const std::optional<FeatureHit>& hit,
                                                   const MapModel& model)
{
    std::vector<FeedbackEvent> out;
    auto leave = [&] {
        if (_current)
        {
            out.push_back({FeedbackType::Leave, now, _current->kind, _current->id, {}});
            _current.reset();
        }
    };

    if (!hit)
    {
        leave();
        if (!_ambient)
        {
            _ambient = true;
            out.push_back({FeedbackType::AmbientOn, now, FeatureKind::None, {}, {}});
        }
        return out;
    }

    if (_ambient)
    {
        _ambient = false;
        out.push_back({FeedbackType::AmbientOff, now, FeatureKind::None, {}, {}});
    }

    if (!hit->is_feature())
    {
        leave();
        return out;
    }

    if (_current && _current->same_feature(*hit))
    {
        _current = hit;
        if (!_dwell_sent && now - _entered_at >= _dwell)
        {
            _dwell_sent = true;
            out.push_back({FeedbackType::Dwell, now, hit->kind, hit->id, accessibility_text(*hit, model)});
        }
        return out;
    }

    leave();
    _current = hit;
    _entered_at = now;
    _dwell_sent = false;
    out.push_back({FeedbackType::Enter, now, hit->kind, hit->id, announcement(*hit, model)});
    return out;
}

std::vector<FeedbackEvent> feedback_events(std::span<const TimedHit> hits, const MapModel& model, Millis dwell_threshold)
{
    FeedbackTracker tracker(dwell_threshold);
    std::vector<FeedbackEvent> out;
    for (const auto& h : hits)
    {
        auto events = tracker.update(h.at, h.hit, model);
        out.insert(out.end(), events.begin(), events.end());
    }
    return out;
}

void BusyTicker::start(Millis now)
{
    _pending = true;
    _next = now + _interval;
}

std::vector<Millis> BusyTicker::advance(Millis now)
{
    std::vector<Millis> ticks;
    while (_pending && _next <= now)
    {
        ticks.push_back(_next);
        _next += _interval;
    }
    return ticks;
}

// ---------------------------------------------------------------------------------------
// tracker

PointerTracker::PointerTracker(std::shared_ptr<const MapModel> model, TrackerConfig config)
    : _model(std::move(model)), _config(config), _feedback(config.dwell_threshold),
      _snapshot(std::make_shared<PointerSnapshot>())
{
    if (!_model)
        fail(ErrorKind::Validation, "pointer tracker needs a map");
    if (config.window == 0)
        fail(ErrorKind::Validation, "smoothing window must hold at least one sample");
    _snap.capture_radius_m = config.capture_radius_m;
    _snap.release_radius_m = config.release_radius_m;
}

std::vector<FeedbackEvent> PointerTracker::ingest(Millis now, std::span<const HandFrame> hands)
{
    if (_last && now <= *_last)
        fail(ErrorKind::Validation, fmt::format("pointer timestamps must increase ({} ms after {} ms)", now.count(),
                                                _last->count()));
    _last = now;

    std::vector<HandMotion> motions;
    std::set<Hand> seen;
    for (const auto& h : hands)
    {
        if (!h.pointing || !is_finite(h.map_position) || !seen.insert(h.hand).second)
            continue;
        auto [it, inserted] = _windows.try_emplace(h.hand, _config.window);
        it->second.smooth(h.map_position);
        motions.push_back({h.hand, h.map_position, it->second.displacement()});
    }
    for (auto it = _windows.begin(); it != _windows.end();)
    {
        if (!seen.count(it->first))
            it = _windows.erase(it);
        else
            ++it;
    }

    auto snapshot = std::make_shared<PointerSnapshot>();
    snapshot->at = now;
    _active = arbitrate(motions, _model->frame().bounds(), _active);

    std::vector<FeedbackEvent> events;
    if (_active)
    {
        const Point2D pos = _windows.at(*_active).mean();
        auto hit = snap(pos, *_model, _snap, _discovered);
        snapshot->hand = _active;
        snapshot->position = pos;
        snapshot->hit = hit;
        events = _feedback.update(now, hit, *_model);
    }
    else
    {
        _snap.current.reset();
        events = _feedback.update(now, std::nullopt, *_model);
    }

    {
        std::lock_guard lock(_snapshot_mutex);
        _snapshot = std::move(snapshot);
    }
    return events;
}

std::shared_ptr<const PointerSnapshot> PointerTracker::snapshot() const
{
    std::lock_guard lock(_snapshot_mutex);
    return _snapshot;
}

} // namespace mapio::pointer
