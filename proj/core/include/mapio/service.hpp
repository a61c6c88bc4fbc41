// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mapio/chat.hpp"
#include "mapio/conversation.hpp"
#include "mapio/map_model.hpp"
#include "mapio/navigation.hpp"
#include "mapio/pointer.hpp"
#include "mapio/time.hpp"

#include <nlohmann/json.hpp>

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <future>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mapio::service {

/// Engine constants. Loaded from one JSON file, then overridden by MAPIO_* environment
/// variables (see config/mapio.example.json).
struct EngineConfig
{
    pointer::TrackerConfig tracker;
    prompt::ConversationConfig conversation;
    Millis busy_tick_interval{7000};
    int preset = 8;
    bool announce_streets_during_nav = true;
};

using EnvLookup = std::function<std::optional<std::string>(std::string_view)>;

EngineConfig config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const EngineConfig& config);
void apply_env_overrides(EngineConfig& config, const EnvLookup& env);
/// Empty path: defaults. Always applies the process environment.
EngineConfig load_config(const std::string& path);

enum class WireType {
    Enter,
    Leave,
    Dwell,
    AmbientOn,
    AmbientOff,
    BusyTick,
    Answer,
    NavStep,
    NavReroute,
    NavArrived,
    BeaconCue,
    BeaconArrived,
    Error,
};

std::string_view to_string(WireType t);

struct WireEvent
{
    std::uint64_t seq = 0;
    WireType type = WireType::Error;
    nlohmann::json payload = nlohmann::json::object();

    nlohmann::json to_json() const;
    std::string to_json_line() const; // {"payload":...,"seq":N,"type":"ENTER"}
};

/// Sequenced, fan-out event stream with a retained log.
class EventBus
{
public:
    using Subscriber = std::function<void(const WireEvent&)>;

    WireEvent publish(WireType type, nlohmann::json payload);
    std::size_t subscribe(Subscriber s);
    void unsubscribe(std::size_t id);

    std::vector<WireEvent> since(std::uint64_t seq) const;
    /// Blocks until an event newer than `seq` exists or the timeout passes.
    std::vector<WireEvent> wait_since(std::uint64_t seq, std::chrono::milliseconds timeout) const;
    std::uint64_t last_seq() const;

private:
    mutable std::mutex _mutex;
    mutable std::condition_variable _cv;
    std::vector<WireEvent> _log;
    std::vector<std::pair<std::size_t, Subscriber>> _subscribers;
    std::size_t _next_subscriber = 0;
};

enum class TurnMode {
    Synchronous, // the turn runs inside question(); the answer lands at start + backend latency
    Background,  // the turn runs on a worker thread; the answer lands at the first advance() after it finishes
};

using Guidance = std::variant<std::monostate, nav::NavSession, nav::BeaconSession>;

/// One interactive session: map, pointer, conversation, guidance and bookmarks. Not
/// thread-safe; the HTTP service serialises calls.
class Session
{
public:
    Session(std::shared_ptr<const MapModel> model, EngineConfig config, std::shared_ptr<prompt::ChatBackend> backend,
            EventBus& bus, TurnMode mode = TurnMode::Synchronous);
    ~Session();

    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    /// Wall clock used for "current time" at session t = 0.
    void set_wall_time(const WallTime& base) { _wall_base = base; }
    WallTime wall_time(Millis now) const;

    void pointer_frame(Millis now, std::span<const pointer::HandFrame> hands);
    /// Applies the gesture rule to each hand and maps index tips through the homography.
    void landmark_frame(Millis now, std::span<const pointer::HandLandmarks> hands, const pointer::Homography& h);

    void press_talk(Millis now);
    void release_talk(Millis now);
    /// Accepted only while talk is pressed and no turn is pending.
    void question(Millis now, std::string text);
    void halt(Millis now);
    void pause(Millis now);
    void resume(Millis now);
    void stop_guidance(Millis now);

    /// Moves the clock: emits busy ticks and delivers a finished answer.
    void advance(Millis now);
    /// Background mode: blocks until the pending turn's worker finishes.
    void wait_turn();

    void error(Millis now, std::string_view message);

    bool turn_pending() const { return _pending.has_value(); }
    bool talk_pressed() const { return _talk_snapshot != nullptr; }
    const Guidance& guidance() const { return _guidance; }
    const prompt::Conversation& conversation() const { return _conversation; }
    const pointer::PointerTracker& tracker() const { return _tracker; }
    const MapModel& model() const { return *_model; }
    const EngineConfig& config() const { return _config; }

private:
    struct PendingTurn
    {
        Millis started{0};
        std::future<prompt::TurnResult> result;
        std::optional<Millis> ready_at;
        bool suppressed = false;
        std::string question;
    };

    void emit(WireType type, nlohmann::json payload, Millis now);
    void emit_feedback(const std::vector<pointer::FeedbackEvent>& events);
    void update_guidance(Millis now);
    void deliver(Millis now);
    void start_guidance(const prompt::GuidanceStart& start, Millis now);

    std::shared_ptr<const MapModel> _model;
    EngineConfig _config;
    std::shared_ptr<prompt::ChatBackend> _backend;
    EventBus& _bus;
    TurnMode _mode;
    pointer::PointerTracker _tracker;
    prompt::Conversation _conversation;
    pointer::BusyTicker _ticker;
    Guidance _guidance;
    std::optional<PendingTurn> _pending;
    std::shared_ptr<const pointer::PointerSnapshot> _talk_snapshot;
    WallTime _wall_base;
    bool _paused = false;
    Millis _now{0};
};

/// A replay trace: one record per line.
///
///   # comment
///   wall Monday 14:00                  session wall clock at t = 0
///   homography h00 h01 ... h22         image-to-map transform for later samples
///   <t_ms> none                        frame without hands
///   <t_ms> left|right x y              pointer sample (pointing)
///   <t_ms> left|right x y l0x l0y ...  sample with 20 landmarks; gesture rule applies
///   <t_ms> press | release | halt | pause | resume | stop-guidance | tick
///   <t_ms> ask <question text>
///
/// Consecutive samples with equal t_ms form one frame. Without a homography, x y are
/// map coordinates.
struct TraceRecord
{
    enum class Kind { Frame, Press, Release, Ask, Halt, Pause, Resume, StopGuidance, Tick };

    Kind kind = Kind::Tick;
    Millis at{0};
    std::vector<pointer::HandFrame> hands;
    std::vector<pointer::HandLandmarks> landmarks; // parallel to hands when present
    std::optional<pointer::Homography> homography;
    std::string text;
    std::size_t line = 0;
};

struct Trace
{
    std::optional<WallTime> wall;
    std::vector<TraceRecord> records;
};

Trace parse_trace(std::istream& in);
Trace load_trace_file(const std::string& path);

/// Deterministic event log for (map, trace, backend script, config).
std::vector<WireEvent> replay(std::shared_ptr<const MapModel> model, const Trace& trace,
                              std::shared_ptr<prompt::ChatBackend> backend, const EngineConfig& config);

std::string to_json_lines(std::span<const WireEvent> events);

/// Builds a backend from a CLI spec: "scripted:<file>" or "live".
std::shared_ptr<prompt::ChatBackend> make_backend(std::string_view spec);

/// HTTP command surface plus a server-sent event stream.
///
///   GET  /health                    GET  /map            POST /map
///   POST /pointer                   POST /talk/press     POST /talk/release
///   POST /question                  POST /halt           POST /pause   POST /resume
///   POST /guidance/stop             GET  /events (SSE)   GET  /events/log?since=N
class HttpService
{
public:
    using BackendFactory = std::function<std::shared_ptr<prompt::ChatBackend>()>;

    HttpService(EngineConfig config, BackendFactory backends, std::shared_ptr<const MapModel> model = nullptr);
    ~HttpService();

    HttpService(const HttpService&) = delete;
    HttpService& operator=(const HttpService&) = delete;

    /// Binds and serves on a background thread; port 0 picks a free port. Returns the port.
    int start(const std::string& host, int port);
    void stop();
    /// Blocks until stop().
    void wait();

    EventBus& bus() { return *_bus; }

private:
    struct Impl;
    std::unique_ptr<Impl> _impl;
    std::shared_ptr<EventBus> _bus;
};

} // namespace mapio::service
