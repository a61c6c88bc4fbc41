// SPDX-License-Identifier: Apache-2.0
#include "mapio/service.hpp"

#include "mapio/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace mapio::service {

using nlohmann::json;

namespace {

WireType wire_type(pointer::FeedbackType t)
{
    switch (t)
    {
        case pointer::FeedbackType::Enter: return WireType::Enter;
        case pointer::FeedbackType::Leave: return WireType::Leave;
        case pointer::FeedbackType::Dwell: return WireType::Dwell;
        case pointer::FeedbackType::AmbientOn: return WireType::AmbientOn;
        case pointer::FeedbackType::AmbientOff: return WireType::AmbientOff;
        case pointer::FeedbackType::BusyTick: return WireType::BusyTick;
    }
    return WireType::Error;
}

std::string_view kind_name(ErrorKind k)
{
    switch (k)
    {
        case ErrorKind::Validation: return "validation";
        case ErrorKind::NotFound: return "not_found";
        case ErrorKind::Degenerate: return "degenerate";
        case ErrorKind::Unreachable: return "unreachable";
        case ErrorKind::Backend: return "backend";
        case ErrorKind::Runtime: return "runtime";
    }
    return "runtime";
}

/// Centimetre precision keeps the wire format readable.
double round2(double v)
{
    return std::round(v * 100.0) / 100.0;
}

} // namespace

Session::Session(std::shared_ptr<const MapModel> model, EngineConfig config,
                 std::shared_ptr<prompt::ChatBackend> backend, EventBus& bus, TurnMode mode):
    _model(std::move(model)),
    _config(std::move(config)),
    _backend(std::move(backend)),
    _bus(bus),
    _mode(mode),
    _tracker(_model, _config.tracker),
    _conversation(_model, _config.preset, _backend, _config.conversation),
    _ticker(_config.busy_tick_interval)
{
    _tracker.set_discovered(_conversation.effects().discovered);
}

Session::~Session()
{
    if (_pending && _pending->result.valid())
        _pending->result.wait();
}

WallTime Session::wall_time(Millis now) const
{
    const long long minutes = _wall_base.minute + now.count() / 60000;
    WallTime t;
    t.minute = static_cast<int>(minutes % kMinutesPerDay);
    t.day = static_cast<Weekday>((static_cast<long long>(_wall_base.day) + minutes / kMinutesPerDay) % 7);
    return t;
}

void Session::emit(WireType type, json payload, Millis now)
{
    payload["t_ms"] = now.count();
    _bus.publish(type, std::move(payload));
}

void Session::error(Millis now, std::string_view message)
{
    emit(WireType::Error, {{"message", std::string(message)}}, now);
}

void Session::emit_feedback(const std::vector<pointer::FeedbackEvent>& events)
{
    if (_paused)
        return;
    const bool navigating = std::holds_alternative<nav::NavSession>(_guidance);
    for (const auto& e : events)
    {
        if (navigating && !_config.announce_streets_during_nav && e.kind == pointer::FeatureKind::Street)
            continue;
        json payload = {{"text", e.text}};
        if (e.kind != pointer::FeatureKind::None)
        {
            payload["kind"] = pointer::to_string(e.kind);
            payload["id"] = e.id;
        }
        emit(wire_type(e.type), std::move(payload), e.at);
    }
}

void Session::pointer_frame(Millis now, std::span<const pointer::HandFrame> hands)
{
    advance(now);
    emit_feedback(_tracker.ingest(now, hands));
    update_guidance(now);
}

void Session::landmark_frame(Millis now, std::span<const pointer::HandLandmarks> hands, const pointer::Homography& h)
{
    std::vector<pointer::HandFrame> frames;
    for (const auto& lm : hands)
    {
        pointer::HandFrame f;
        f.hand = lm.hand;
        f.pointing = pointer::detect_pointing(lm, _config.tracker.gesture);
        try
        {
            f.map_position = pointer::to_map_coords(h, lm.index_tip());
        }
        catch (const Error& e)
        {
            if (e.kind() != ErrorKind::Degenerate)
                throw;
            continue;
        }
        frames.push_back(f);
    }
    pointer_frame(now, frames);
}

void Session::press_talk(Millis now)
{
    advance(now);
    if (_talk_snapshot)
    {
        error(now, "talk button is already pressed");
        return;
    }
    _talk_snapshot = _tracker.snapshot();
}

void Session::release_talk(Millis now)
{
    advance(now);
    if (!_talk_snapshot)
    {
        error(now, "talk button is not pressed");
        return;
    }
    _talk_snapshot.reset();
}

void Session::question(Millis now, std::string text)
{
    advance(now);
    if (!_talk_snapshot)
    {
        error(now, "questions are accepted only while the talk button is pressed");
        return;
    }
    if (_pending)
    {
        error(now, "an answer is still pending; the question was not sent");
        return;
    }

    const std::optional<Point2D> pointed = _talk_snapshot->position;
    const WallTime wall = wall_time(now);

    PendingTurn turn;
    turn.started = now;
    turn.question = text;
    if (_mode == TurnMode::Synchronous)
    {
        std::promise<prompt::TurnResult> promise;
        try
        {
            auto result = _conversation.converse(text, pointed, wall);
            turn.ready_at = now + result.latency;
            promise.set_value(std::move(result));
        }
        catch (...)
        {
            turn.ready_at = now;
            promise.set_exception(std::current_exception());
        }
        turn.result = promise.get_future();
    }
    else
    {
        turn.result = std::async(std::launch::async, [this, text = std::move(text), pointed, wall] {
            return _conversation.converse(text, pointed, wall);
        });
    }
    _pending = std::move(turn);
    _ticker.start(now);
    advance(now);
}

void Session::halt(Millis now)
{
    advance(now);
    if (_pending)
        _pending->suppressed = true;
}

void Session::pause(Millis now)
{
    advance(now);
    _paused = true;
}

void Session::resume(Millis now)
{
    advance(now);
    _paused = false;
}

void Session::stop_guidance(Millis now)
{
    advance(now);
    _guidance = std::monostate{};
}

void Session::wait_turn()
{
    if (_pending && _pending->result.valid())
        _pending->result.wait();
}

void Session::advance(Millis now)
{
    if (now > _now)
        _now = now;
    if (!_pending)
        return;
    if (!_pending->ready_at &&
        _pending->result.wait_for(std::chrono::seconds(0)) == std::future_status::ready)
        _pending->ready_at = _now;

    // ticks fall strictly before the answer lands
    const Millis limit = _pending->ready_at ? std::min(_now, *_pending->ready_at - Millis(1)) : _now;
    for (Millis t : _ticker.advance(limit))
        emit(WireType::BusyTick, {{"elapsed_ms", (t - _pending->started).count()}}, t);

    if (_pending->ready_at && *_pending->ready_at <= _now)
        deliver(*_pending->ready_at);
}

void Session::deliver(Millis at)
{
    PendingTurn turn = std::move(*_pending);
    _pending.reset();
    _ticker.stop();
    try
    {
        prompt::TurnResult result = turn.result.get();
        emit(WireType::Answer,
             {{"text", result.answer},
              {"question", turn.question},
              {"suppressed", turn.suppressed},
              {"tool_rounds", result.tool_rounds},
              {"latency_ms", result.latency.count()}},
             at);
        _tracker.set_discovered(_conversation.effects().discovered);
        if (result.guidance)
            start_guidance(*result.guidance, at);
    }
    catch (const Error& e)
    {
        emit(WireType::Error,
             {{"message", e.what()}, {"kind", kind_name(e.kind())}, {"question", turn.question}}, at);
    }
}

void Session::start_guidance(const prompt::GuidanceStart& start, Millis now)
{
    if (const auto* nav = std::get_if<nav::NavStart>(&start))
    {
        _guidance = nav->session;
        if (nav->first)
        {
            emit(WireType::NavStep,
                 {{"step", 0}, {"instruction", nav->first->text}, {"target", nav->session.target_name},
                  {"steps", nav->session.instructions.size()}},
                 now);
        }
        else
        {
            emit(WireType::NavArrived, {{"text", "You are already at " + nav->session.target_name + "."},
                                        {"target", nav->session.target_name}},
                 now);
            _guidance = std::monostate{};
        }
        return;
    }
    _guidance = std::get<nav::BeaconSession>(start);
    update_guidance(now);
}

void Session::update_guidance(Millis now)
{
    if (_paused || std::holds_alternative<std::monostate>(_guidance))
        return;
    const auto snap = _tracker.snapshot();
    if (!snap->position)
        return;

    if (auto* nav = std::get_if<nav::NavSession>(&_guidance))
    {
        bool finished = false;
        for (const auto& e : nav::update_street_nav(*nav, *snap->position, snap->hit, *_model))
        {
            switch (e.type)
            {
                case nav::NavEventType::StepDone:
                    emit(WireType::NavStep,
                         {{"step", e.step + 1},
                          {"completed_step", e.step},
                          {"instruction", e.instruction ? json(e.instruction->text) : json(nullptr)},
                          {"target", nav->target_name}},
                         now);
                    break;
                case nav::NavEventType::WrongDirection:
                    emit(WireType::NavReroute,
                         {{"reason", "wrong_direction"}, {"distance_m", round2(e.distance_m)}, {"text", e.text}}, now);
                    break;
                case nav::NavEventType::Rerouted:
                    emit(WireType::NavReroute,
                         {{"reason", "rerouted"},
                          {"instruction", e.instruction ? json(e.instruction->text) : json(nullptr)},
                          {"text", e.text}},
                         now);
                    break;
                case nav::NavEventType::Arrived:
                    emit(WireType::NavArrived, {{"text", e.text}, {"target", nav->target_name}}, now);
                    finished = true;
                    break;
            }
        }
        if (finished || nav->status == nav::NavStatus::Cancelled)
            _guidance = std::monostate{};
        return;
    }

    auto& beacon = std::get<nav::BeaconSession>(_guidance);
    if (auto e = nav::update_flyme(beacon, *snap->position, now))
    {
        if (e->type == nav::BeaconEventType::Arrived)
        {
            emit(WireType::BeaconArrived, {{"text", e->text}, {"target", beacon.target_name},
                                           {"distance_m", round2(e->distance_m)}},
                 now);
            _guidance = std::monostate{};
            return;
        }
        emit(WireType::BeaconCue,
             {{"direction", spatial::cardinal_symbol(e->direction)},
              {"distance_m", round2(e->distance_m)},
              {"text", e->text}},
             now);
    }
}

} // namespace mapio::service
