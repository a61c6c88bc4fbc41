// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mapio/map_model.hpp"
#include "mapio/spatial.hpp"
#include "mapio/time.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace mapio::prompt {

enum class GraphFormat { None, Structured, Text };

enum class PcdStyle {
    PositionText, // prose description of the pointed position
    CameraImage,  // image payload descriptor: camera frame with map and hand
    MarkerImage,  // image payload descriptor: map rendering with a position marker
    Structured,   // local coordinates, closest edge, address, distances from nodes
};

/// One benchmark configuration. Each flag switches on a block of text or a tool group;
/// iterations are cumulative.
struct Preset
{
    int iteration = 8;
    bool grounding = false;
    bool poi_list = false;
    bool local_frame = false;
    GraphFormat graph = GraphFormat::None;
    bool intersection_types = false;
    PcdStyle pcd = PcdStyle::PositionText;
    bool spatial_tools = false;
    bool poi_tools = false;        // first-step navigation rule, discoverable POIs, bookmarks
    bool navigation_tools = false; // guidance activation and routing intents
};

inline constexpr int kPresetCount = 8;

/// Presets 1..8; throws Validation otherwise.
const Preset& preset(int iteration);

struct AnsweringInstructions
{
    std::string text;
    nlohmann::json tools = nlohmann::json::array();
};

struct MapContextualInformation
{
    std::string text;
};

struct SystemInstructions
{
    int preset = 8;
    AnsweringInstructions answering;
    MapContextualInformation map_context;
    std::string text; // answering + map context

    /// FNV-1a 64 of `text`, lowercase hex.
    std::string hash() const;
};

AnsweringInstructions build_answering_instructions(const Preset& preset);
MapContextualInformation build_map_context(const MapModel& model, const Preset& preset);
SystemInstructions build_system_instructions(const MapModel& model, int preset_iteration);

/// Tool definitions enabled by a preset, in catalog order.
nlohmann::json tool_catalog(const Preset& preset);

struct PromptContextualData
{
    std::string text;
    std::optional<spatial::EdgeProjection> edge; // set when a position was given
};

/// Describes the pointed position (if any) and the current time.
PromptContextualData generate_pcd(const std::optional<Point2D>& position, const MapModel& model, const WallTime& now,
                                  const Preset& preset = mapio::prompt::preset(kPresetCount));

inline constexpr std::string_view kQuestionSeparator = "\n[Question]\n";

struct CombinedPrompt
{
    std::string pcd;
    std::string user_text;
    std::string text;
};

/// PCD block, separator, user text.
CombinedPrompt combine(std::string_view user_text, std::string_view pcd);
/// Inverse of combine; throws Validation when no separator is present.
CombinedPrompt split_combined(std::string_view text);

std::string fnv1a_hex(std::string_view text);

} // namespace mapio::prompt
