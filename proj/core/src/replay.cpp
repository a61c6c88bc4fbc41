// SPDX-License-Identifier: Apache-2.0
#include "mapio/service.hpp"

#include "mapio/error.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <fstream>
#include <istream>
#include <sstream>

namespace mapio::service {

namespace {

[[noreturn]] void trace_error(std::size_t line, const std::string& what)
{
    fail(ErrorKind::Validation, fmt::format("trace line {}: {}", line, what));
}

double number(const std::string& token, std::size_t line)
{
    try
    {
        std::size_t used = 0;
        const double v = std::stod(token, &used);
        if (used == token.size() && std::isfinite(v))
            return v;
    }
    catch (const std::exception&)
    {
    }
    trace_error(line, "expected a number, got \"" + token + "\"");
}

std::optional<TraceRecord::Kind> command_kind(const std::string& word)
{
    using K = TraceRecord::Kind;
    if (word == "press")
        return K::Press;
    if (word == "release")
        return K::Release;
    if (word == "halt")
        return K::Halt;
    if (word == "pause")
        return K::Pause;
    if (word == "resume")
        return K::Resume;
    if (word == "stop-guidance")
        return K::StopGuidance;
    if (word == "tick")
        return K::Tick;
    return std::nullopt;
}

} // namespace

Trace parse_trace(std::istream& in)
{
    Trace trace;
    std::optional<pointer::Homography> homography;
    std::string raw;
    std::size_t line = 0;
    Millis last{-1};
    while (std::getline(in, raw))
    {
        ++line;
        if (const auto hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        const auto tokens = detail::split_ws(raw);
        if (tokens.empty())
            continue;

        if (tokens[0] == "wall")
        {
            if (tokens.size() != 3)
                trace_error(line, "expected: wall <Day> <HH:MM>");
            try
            {
                trace.wall = parse_wall_time(tokens[1] + " " + tokens[2]);
            }
            catch (const Error& e)
            {
                trace_error(line, e.what());
            }
            continue;
        }
        if (tokens[0] == "homography")
        {
            if (tokens.size() != 10)
                trace_error(line, "expected 9 matrix entries");
            std::array<double, 9> m{};
            for (std::size_t i = 0; i < 9; ++i)
                m[i] = number(tokens[i + 1], line);
            try
            {
                homography = pointer::Homography::from_matrix(m);
            }
            catch (const Error& e)
            {
                trace_error(line, e.what());
            }
            continue;
        }

        if (tokens.size() < 2)
            trace_error(line, "expected: <t_ms> <command>");
        const double t = number(tokens[0], line);
        if (t < 0 || t != static_cast<double>(static_cast<long long>(t)))
            trace_error(line, "time must be a non-negative integer of milliseconds");
        const Millis at{static_cast<long long>(t)};
        if (at < last)
            trace_error(line, "time goes backwards");
        last = at;

        TraceRecord rec;
        rec.at = at;
        rec.line = line;
        const std::string& word = tokens[1];

        if (word == "ask")
        {
            rec.kind = TraceRecord::Kind::Ask;
            const auto pos = raw.find("ask");
            rec.text = detail::trim(std::string_view(raw).substr(pos + 3));
            if (rec.text.empty())
                trace_error(line, "ask needs question text");
            trace.records.push_back(std::move(rec));
            continue;
        }
        if (auto kind = command_kind(word))
        {
            if (tokens.size() != 2)
                trace_error(line, "unexpected arguments after " + word);
            rec.kind = *kind;
            trace.records.push_back(std::move(rec));
            continue;
        }
        if (word == "none")
        {
            rec.kind = TraceRecord::Kind::Frame;
            rec.homography = homography;
            trace.records.push_back(std::move(rec));
            continue;
        }
        if (word == "left" || word == "right")
        {
            if (tokens.size() != 4 && tokens.size() != 4 + 2 * pointer::kLandmarkCount)
                trace_error(line, fmt::format("expected x y and optionally {} landmark coordinates",
                                              2 * pointer::kLandmarkCount));
            pointer::HandFrame hand;
            hand.hand = pointer::parse_hand(word);
            hand.map_position = {number(tokens[2], line), number(tokens[3], line)};
            hand.pointing = true;
            std::optional<pointer::HandLandmarks> lm;
            if (tokens.size() > 4)
            {
                std::vector<Point2D> pts;
                for (std::size_t i = 0; i < pointer::kLandmarkCount; ++i)
                    pts.push_back({number(tokens[4 + 2 * i], line), number(tokens[5 + 2 * i], line)});
                lm = pointer::HandLandmarks::from_points(hand.hand, pts);
            }

            const bool merge = !trace.records.empty() && trace.records.back().kind == TraceRecord::Kind::Frame &&
                               trace.records.back().at == at && !trace.records.back().hands.empty();
            if (merge)
            {
                auto& prev = trace.records.back();
                if (prev.landmarks.empty() != !lm)
                    trace_error(line, "hands of one frame must all have landmarks or none");
                prev.hands.push_back(hand);
                if (lm)
                    prev.landmarks.push_back(*lm);
                continue;
            }
            rec.kind = TraceRecord::Kind::Frame;
            rec.homography = homography;
            rec.hands.push_back(hand);
            if (lm)
                rec.landmarks.push_back(*lm);
            trace.records.push_back(std::move(rec));
            continue;
        }
        trace_error(line, "unknown command \"" + word + "\"");
    }
    return trace;
}

Trace load_trace_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::NotFound, "cannot open trace " + path);
    return parse_trace(in);
}

std::vector<WireEvent> replay(std::shared_ptr<const MapModel> model, const Trace& trace,
                              std::shared_ptr<prompt::ChatBackend> backend, const EngineConfig& config)
{
    EventBus bus;
    {
        Session session(model, config, std::move(backend), bus, TurnMode::Synchronous);
        if (trace.wall)
            session.set_wall_time(*trace.wall);

        Millis now{0};
        for (const auto& rec : trace.records)
        {
            now = rec.at;
            try
            {
                switch (rec.kind)
                {
                    case TraceRecord::Kind::Frame: {
                        std::vector<pointer::HandFrame> hands = rec.hands;
                        for (std::size_t i = 0; i < hands.size(); ++i)
                        {
                            if (!rec.landmarks.empty())
                                hands[i].pointing = pointer::detect_pointing(rec.landmarks[i], config.tracker.gesture);
                            if (rec.homography)
                            {
                                const Point2D frame_point =
                                    rec.landmarks.empty() ? hands[i].map_position : rec.landmarks[i].index_tip();
                                hands[i].map_position = pointer::to_map_coords(*rec.homography, frame_point);
                            }
                        }
                        session.pointer_frame(rec.at, hands);
                        break;
                    }
                    case TraceRecord::Kind::Press: session.press_talk(rec.at); break;
                    case TraceRecord::Kind::Release: session.release_talk(rec.at); break;
                    case TraceRecord::Kind::Ask: session.question(rec.at, rec.text); break;
                    case TraceRecord::Kind::Halt: session.halt(rec.at); break;
                    case TraceRecord::Kind::Pause: session.pause(rec.at); break;
                    case TraceRecord::Kind::Resume: session.resume(rec.at); break;
                    case TraceRecord::Kind::StopGuidance: session.stop_guidance(rec.at); break;
                    case TraceRecord::Kind::Tick: session.advance(rec.at); break;
                }
            }
            catch (const Error& e)
            {
                session.error(rec.at, fmt::format("line {}: {}", rec.line, e.what()));
            }
        }
        // let a turn still in flight at the end of the trace finish
        for (int i = 0; i < 100000 && session.turn_pending(); ++i)
        {
            now += config.busy_tick_interval;
            session.advance(now);
        }
    }
    return bus.since(0);
}

std::shared_ptr<prompt::ChatBackend> make_backend(std::string_view spec)
{
    constexpr std::string_view scripted = "scripted:";
    if (spec.substr(0, scripted.size()) == scripted)
    {
        const auto path = std::string(spec.substr(scripted.size()));
        if (path.empty())
            fail(ErrorKind::Validation, "scripted backend needs a file: scripted:<file>");
        return prompt::ScriptedBackend::from_file(path);
    }
    if (spec == "live")
        return prompt::make_live_backend({});
    fail(ErrorKind::Validation, fmt::format("unknown backend \"{}\"; use scripted:<file> or live", spec));
}

} // namespace mapio::service
