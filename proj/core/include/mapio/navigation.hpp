// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mapio/map_model.hpp"
#include "mapio/pointer.hpp"
#include "mapio/spatial.hpp"
#include "mapio/time.hpp"

#include <optional>
#include <string>
#include <vector>

/// The two guidance state machines. Once started they run purely on pointer updates.
namespace mapio::nav {

struct NavConfig
{
    double off_route_budget_m = 25.0;
    /// Radius within which the end intersection of a step counts as reached.
    double capture_radius_m = 12.0;
    spatial::Verbosity verbosity = spatial::Verbosity::Concise;
};

enum class NavStatus { Active, Rerouting, Arrived, Cancelled };

std::string_view to_string(NavStatus s);

struct NavSession
{
    spatial::Endpoint target;
    std::string target_name;
    Point2D origin; // where the current route was computed from
    spatial::Route route;
    std::vector<spatial::Instruction> instructions;
    std::size_t step_index = 0;
    NavStatus status = NavStatus::Active;
    std::optional<spatial::EdgeProjection> last_progress;
    double off_route_budget_m = 25.0;
    double capture_radius_m = 12.0;
    spatial::Verbosity verbosity = spatial::Verbosity::Concise;
};

struct NavStart
{
    NavSession session;
    std::optional<spatial::Instruction> first; // unset when already at the target
};

/// Plans the route and returns only its first instruction. Throws Unreachable.
NavStart start_street_nav(Point2D from, const spatial::Endpoint& to, const MapModel& model,
                          const NavConfig& config = {});

enum class NavEventType { StepDone, WrongDirection, Rerouted, Arrived };

std::string_view to_string(NavEventType t);

struct NavEvent
{
    NavEventType type = NavEventType::StepDone;
    std::size_t step = 0;                           // completed step for StepDone
    std::optional<spatial::Instruction> instruction; // next / new first instruction
    double distance_m = 0.0;                         // off-route distance for WrongDirection
    std::string text;
};

/// Advances the session with a new pointer position. Silent progress yields no events.
std::vector<NavEvent> update_street_nav(NavSession& session, Point2D pos, const pointer::FeatureHit& hit,
                                        const MapModel& model);

struct BeaconConfig
{
    double arrival_radius_m = 10.0;
    Millis cue_min_interval{1000};
};

enum class BeaconStatus { Active, Arrived, Cancelled };

struct BeaconSession
{
    Point2D target;
    std::string target_name;
    double last_distance_m = 0.0;
    double arrival_radius_m = 10.0;
    Millis cue_min_interval{1000};
    std::optional<spatial::Cardinal> last_cue;
    std::optional<Millis> last_cue_at;
    BeaconStatus status = BeaconStatus::Active;
};

BeaconSession start_flyme(const spatial::Endpoint& target, const MapModel& model, const BeaconConfig& config = {});

enum class BeaconEventType { Cue, Arrived };

struct BeaconEvent
{
    BeaconEventType type = BeaconEventType::Cue;
    spatial::Cardinal direction = spatial::Cardinal::N;
    double distance_m = 0.0;
    std::string text;
};

/// Arrival inside the radius, otherwise a cardinal cue when the previous one is stale
/// (different sector or older than the minimum interval).
std::optional<BeaconEvent> update_flyme(BeaconSession& session, Point2D pos, Millis now);

/// Display name of a routing endpoint.
std::string endpoint_name(const spatial::Endpoint& e, const MapModel& model);

} // namespace mapio::nav
