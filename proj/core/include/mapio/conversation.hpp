// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mapio/chat.hpp"
#include "mapio/label.hpp"
#include "mapio/map_model.hpp"
#include "mapio/navigation.hpp"
#include "mapio/pointer.hpp"
#include "mapio/prompt.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mapio::prompt {

/// Case-insensitive alias -> POI id.
class BookmarkStore
{
public:
    /// Returns true when an existing alias was replaced.
    bool remember(std::string_view alias, const Poi& poi);
    /// Throws NotFound.
    const Poi& resolve(std::string_view alias, const MapModel& model) const;
    std::optional<std::string> find(std::string_view alias) const;

    const std::map<std::string, std::string>& entries() const { return _entries; }

    nlohmann::json to_json() const;
    static BookmarkStore from_json(const nlohmann::json& doc);
    void save(const std::string& path) const;
    static BookmarkStore load(const std::string& path); // missing file -> empty store

private:
    std::map<std::string, std::string> _entries; // lowercased alias -> poi id
    std::map<std::string, std::string> _display; // lowercased alias -> alias as given
};

struct ConversationConfig
{
    int max_tool_rounds = 8;
    double near_threshold_m = 30.0;
    double walking_speed_mps = spatial::kDefaultWalkingSpeed;
    nav::NavConfig nav;
    nav::BeaconConfig beacon;
    std::string bookmark_file; // empty: in-memory only
};

using GuidanceStart = std::variant<nav::NavStart, nav::BeaconSession>;

/// Mutable per-session state touched by tool calls.
struct SessionEffects
{
    BookmarkStore bookmarks;
    pointer::DiscoveredPois discovered;
    std::optional<GuidanceStart> guidance; // requested during the current turn
};

/// Executes tool calls against the spatial and navigation modules.
class ToolDispatcher
{
public:
    ToolDispatcher(const MapModel& model, const Preset& preset, const ConversationConfig& config);

    /// Throws NotFound for tool names outside the preset's catalog. Argument problems
    /// come back as {"error": ...} so the backend can recover.
    nlohmann::json dispatch(const ToolCall& call, const std::optional<Point2D>& here, SessionEffects& effects) const;

    const nlohmann::json& catalog() const { return _catalog; }
    bool has_tool(std::string_view name) const;

    /// Resolves {"x","y"} / {"poi"} / {"node"} / {"bookmark"} / {"here": true}, or a bare
    /// POI name / id / bookmark alias string.
    spatial::Endpoint resolve_endpoint(const nlohmann::json& arg, const std::optional<Point2D>& here,
                                       const SessionEffects& effects) const;
    const Poi& resolve_poi(const nlohmann::json& arg, const SessionEffects& effects) const;

private:
    const MapModel& _model;
    const Preset& _preset;
    const ConversationConfig& _config;
    nlohmann::json _catalog;
};

struct TurnResult
{
    std::string answer;
    nlohmann::json transcript; // combined prompt, tool calls and results, answer
    std::size_t tool_rounds = 0;
    Millis latency{0};
    std::optional<GuidanceStart> guidance;
};

/// Session transcript plus the tool-call loop for each user turn.
class Conversation
{
public:
    Conversation(std::shared_ptr<const MapModel> model, int preset_iteration, std::shared_ptr<ChatBackend> backend,
                 ConversationConfig config = {});

    /// Sends the combined prompt, fulfils tool calls, and returns the final answer.
    /// Throws Error(Backend) on backend failure and Error(Runtime) when the tool-round
    /// cap is hit.
    TurnResult converse(std::string_view user_text, const std::optional<Point2D>& pointed, const WallTime& now);

    const SystemInstructions& system() const { return _system; }
    const std::vector<ChatMessage>& history() const { return _history; }
    SessionEffects& effects() { return _effects; }
    const SessionEffects& effects() const { return _effects; }
    const ToolDispatcher& dispatcher() const { return _dispatcher; }
    const Preset& preset() const { return _preset; }

private:
    std::shared_ptr<const MapModel> _model;
    const Preset& _preset;
    std::shared_ptr<ChatBackend> _backend;
    ConversationConfig _config;
    SystemInstructions _system;
    ToolDispatcher _dispatcher;
    std::vector<ChatMessage> _history;
    SessionEffects _effects;
};

struct HeuristicVerdict
{
    Label suggested = Label::PartialIncomplete;
    bool needs_review = true;
    std::string reason;
};

/// Advisory pre-label from containment checks; a human label always wins.
HeuristicVerdict classify_heuristic(std::string_view answer, std::string_view expected);

} // namespace mapio::prompt
