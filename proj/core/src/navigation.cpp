// SPDX-License-Identifier: Apache-2.0
#include "mapio/navigation.hpp"

#include "mapio/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace mapio::nav {

using spatial::Cardinal;

std::string_view to_string(NavStatus s)
{
    switch (s)
    {
        case NavStatus::Active: return "active";
        case NavStatus::Rerouting: return "rerouting";
        case NavStatus::Arrived: return "arrived";
        case NavStatus::Cancelled: return "cancelled";
    }
    return "active";
}

std::string_view to_string(NavEventType t)
{
    switch (t)
    {
        case NavEventType::StepDone: return "STEP_DONE";
        case NavEventType::WrongDirection: return "WRONG_DIRECTION";
        case NavEventType::Rerouted: return "REROUTED";
        case NavEventType::Arrived: return "ARRIVED";
    }
    return "STEP_DONE";
}

std::string endpoint_name(const spatial::Endpoint& e, const MapModel& model)
{
    if (const auto* p = std::get_if<Point2D>(&e))
        return fmt::format("the point ({}, {})", format_meters(p->x), format_meters(p->y));
    if (const auto* n = std::get_if<spatial::NodeRef>(&e))
        return "the intersection of " + model.intersection_name(n->id);
    return model.poi(std::get<spatial::PoiRef>(e).id).name;
}

namespace {

void plan(NavSession& s, Point2D from, const MapModel& model)
{
    s.origin = from;
    s.route = spatial::shortest_route(from, s.target, model);
    s.instructions = spatial::route_instructions(s.route, model, s.verbosity);
    s.step_index = 0;
    s.status = s.instructions.empty() ? NavStatus::Arrived : NavStatus::Active;
}

/// Distance from pos to what is left of the route, including the approach from the
/// point the route was planned from.
double distance_to_remaining(const NavSession& s, Point2D pos)
{
    if (s.route.waypoints.empty())
        return distance(pos, s.origin);
    double best = project_onto_segment(pos, s.origin, s.route.waypoints.front().position).distance;
    const std::size_t first_leg = s.step_index < s.instructions.size() ? s.instructions[s.step_index].first_leg : 0;
    for (std::size_t i = first_leg; i < s.route.legs.size(); ++i)
    {
        const auto& leg = s.route.legs[i];
        const auto d = project_onto_segment(pos, s.route.waypoints[leg.from].position, s.route.waypoints[leg.to].position);
        best = std::min(best, d.distance);
    }
    return best;
}

bool step_reached(const NavSession& s, Point2D pos, const pointer::FeatureHit& hit)
{
    const auto& wp = s.route.waypoints[s.instructions[s.step_index].end_waypoint];
    if (wp.node_id && hit.kind == pointer::FeatureKind::Intersection && hit.id == *wp.node_id)
        return true;
    return distance(pos, wp.position) <= s.capture_radius_m;
}

} // namespace

NavStart start_street_nav(Point2D from, const spatial::Endpoint& to, const MapModel& model, const NavConfig& config)
{
    NavStart out;
    auto& s = out.session;
    s.target = to;
    s.target_name = endpoint_name(to, model);
    s.off_route_budget_m = config.off_route_budget_m;
    s.capture_radius_m = config.capture_radius_m;
    s.verbosity = config.verbosity;
    plan(s, from, model);
    if (!s.instructions.empty())
        out.first = s.instructions.front();
    return out;
}

std::vector<NavEvent> update_street_nav(NavSession& session, Point2D pos, const pointer::FeatureHit& hit,
                                        const MapModel& model)
{
    std::vector<NavEvent> events;
    if (session.status != NavStatus::Active)
        return events;

    const double off = distance_to_remaining(session, pos);
    if (off > session.off_route_budget_m)
    {
        NavEvent wrong;
        wrong.type = NavEventType::WrongDirection;
        wrong.distance_m = off;
        wrong.text = "You are moving away from the route. Recalculating.";
        events.push_back(std::move(wrong));

        session.status = NavStatus::Rerouting;
        try
        {
            plan(session, pos, model);
        }
        catch (const Error& e)
        {
            if (e.kind() != ErrorKind::Unreachable)
                throw;
            session.status = NavStatus::Cancelled;
            NavEvent lost;
            lost.type = NavEventType::Rerouted;
            lost.text = "No route to " + session.target_name + " from here.";
            events.push_back(std::move(lost));
            return events;
        }
        NavEvent rerouted;
        rerouted.type = NavEventType::Rerouted;
        if (!session.instructions.empty())
        {
            rerouted.instruction = session.instructions.front();
            rerouted.text = session.instructions.front().text;
        }
        else
            rerouted.text = "You are at " + session.target_name + ".";
        events.push_back(std::move(rerouted));
        if (session.status == NavStatus::Arrived)
        {
            NavEvent arrived;
            arrived.type = NavEventType::Arrived;
            arrived.text = "You have arrived at " + session.target_name + ".";
            events.push_back(std::move(arrived));
        }
        return events;
    }

    if (!session.route.legs.empty())
    {
        const auto& leg = session.route.legs[session.instructions[session.step_index].first_leg];
        session.last_progress = spatial::project_onto_edge(pos, model.edge(leg.edge_id), model);
    }

    while (session.status == NavStatus::Active && step_reached(session, pos, hit))
    {
        NavEvent done;
        done.type = NavEventType::StepDone;
        done.step = session.step_index;
        ++session.step_index;
        if (session.step_index < session.instructions.size())
        {
            done.instruction = session.instructions[session.step_index];
            done.text = done.instruction->text;
            events.push_back(std::move(done));
            continue;
        }
        events.push_back(std::move(done));
        session.status = NavStatus::Arrived;
        NavEvent arrived;
        arrived.type = NavEventType::Arrived;
        arrived.text = "You have arrived at " + session.target_name + ".";
        events.push_back(std::move(arrived));
    }
    return events;
}

BeaconSession start_flyme(const spatial::Endpoint& target, const MapModel& model, const BeaconConfig& config)
{
    BeaconSession s;
    s.target = spatial::position_of(target, model);
    s.target_name = endpoint_name(target, model);
    s.arrival_radius_m = config.arrival_radius_m;
    s.cue_min_interval = config.cue_min_interval;
    s.last_distance_m = std::numeric_limits<double>::infinity();
    return s;
}

std::optional<BeaconEvent> update_flyme(BeaconSession& session, Point2D pos, Millis now)
{
    if (session.status != BeaconStatus::Active)
        return std::nullopt;
    const double d = distance(pos, session.target);
    session.last_distance_m = d;
    if (d <= session.arrival_radius_m)
    {
        session.status = BeaconStatus::Arrived;
        BeaconEvent e;
        e.type = BeaconEventType::Arrived;
        e.distance_m = d;
        e.text = "You have arrived at " + session.target_name + ".";
        return e;
    }
    const Cardinal dir = spatial::cardinal_of(session.target - pos);
    const bool stale = !session.last_cue || *session.last_cue != dir || !session.last_cue_at ||
                       now - *session.last_cue_at >= session.cue_min_interval;
    if (!stale)
        return std::nullopt;
    session.last_cue = dir;
    session.last_cue_at = now;
    BeaconEvent e;
    e.type = BeaconEventType::Cue;
    e.direction = dir;
    e.distance_m = d;
    e.text = fmt::format("Move {}, {} to go.", spatial::cardinal_name(dir), format_meters(d));
    return e;
}

} // namespace mapio::nav
