// SPDX-License-Identifier: Apache-2.0
#include "mapio/service.hpp"

#include "mapio/error.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <cstdlib>
#include <fstream>
#include <set>

namespace mapio::service {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed)
{
    if (!obj.is_object())
        fail(ErrorKind::Validation, fmt::format("config {}: expected an object", path));
    for (const auto& [key, _] : obj.items())
    {
        bool known = false;
        for (auto a : allowed)
            known = known || a == key;
        if (!known)
            fail(ErrorKind::Validation, fmt::format("config {}/{}: unknown key", path, key));
    }
}

template <class T>
void read(const json& obj, std::string_view key, T& out, const std::string& path)
{
    auto it = obj.find(key);
    if (it == obj.end())
        return;
    try
    {
        out = it->get<T>();
    }
    catch (const json::exception&)
    {
        fail(ErrorKind::Validation, fmt::format("config {}/{}: wrong type", path, key));
    }
}

void read_ms(const json& obj, std::string_view key, Millis& out, const std::string& path)
{
    long long v = out.count();
    read(obj, key, v, path);
    out = Millis(v);
}

spatial::Verbosity parse_verbosity(const std::string& text)
{
    if (text == "concise")
        return spatial::Verbosity::Concise;
    if (text == "accessible")
        return spatial::Verbosity::Accessible;
    fail(ErrorKind::Validation, "config: verbosity must be \"concise\" or \"accessible\"");
}

void validate(const EngineConfig& c)
{
    const auto require = [](bool ok, std::string_view what) {
        if (!ok)
            fail(ErrorKind::Validation, fmt::format("config: {}", what));
    };
    require(c.tracker.capture_radius_m > 0, "tracker.capture_radius_m must be positive");
    require(c.tracker.release_radius_m >= c.tracker.capture_radius_m,
            "tracker.release_radius_m must not be below the capture radius");
    require(c.tracker.window >= 1, "tracker.window must be at least 1");
    require(c.tracker.dwell_threshold.count() >= 0, "tracker.dwell_ms must be non-negative");
    require(c.tracker.gesture.collinearity_tolerance_deg > 0 && c.tracker.gesture.collinearity_tolerance_deg < 90,
            "tracker.collinearity_tolerance_deg must be in (0, 90)");
    require(c.conversation.max_tool_rounds >= 0, "conversation.max_tool_rounds must be non-negative");
    require(c.conversation.near_threshold_m >= 0, "conversation.near_threshold_m must be non-negative");
    require(c.conversation.walking_speed_mps > 0, "conversation.walking_speed_mps must be positive");
    require(c.conversation.nav.off_route_budget_m > 0, "navigation.off_route_budget_m must be positive");
    require(c.conversation.nav.capture_radius_m > 0, "navigation.capture_radius_m must be positive");
    require(c.conversation.beacon.arrival_radius_m > 0, "beacon.arrival_radius_m must be positive");
    require(c.conversation.beacon.cue_min_interval.count() >= 0, "beacon.cue_min_interval_ms must be non-negative");
    require(c.busy_tick_interval.count() > 0, "busy_tick_interval_ms must be positive");
    require(c.preset >= 1 && c.preset <= prompt::kPresetCount, "preset must be between 1 and 8");
}

} // namespace

EngineConfig config_from_json(const json& doc)
{
    EngineConfig c;
    check_keys(doc, "", {"tracker", "conversation", "navigation", "beacon", "busy_tick_interval_ms", "preset",
                         "announce_streets_during_nav"});
    if (auto it = doc.find("tracker"); it != doc.end())
    {
        const json& t = *it;
        check_keys(t, "/tracker",
                   {"collinearity_tolerance_deg", "window", "capture_radius_m", "release_radius_m", "dwell_ms"});
        read(t, "collinearity_tolerance_deg", c.tracker.gesture.collinearity_tolerance_deg, "/tracker");
        read(t, "window", c.tracker.window, "/tracker");
        read(t, "capture_radius_m", c.tracker.capture_radius_m, "/tracker");
        read(t, "release_radius_m", c.tracker.release_radius_m, "/tracker");
        read_ms(t, "dwell_ms", c.tracker.dwell_threshold, "/tracker");
    }
    if (auto it = doc.find("conversation"); it != doc.end())
    {
        const json& t = *it;
        check_keys(t, "/conversation", {"max_tool_rounds", "near_threshold_m", "walking_speed_mps", "bookmark_file"});
        read(t, "max_tool_rounds", c.conversation.max_tool_rounds, "/conversation");
        read(t, "near_threshold_m", c.conversation.near_threshold_m, "/conversation");
        read(t, "walking_speed_mps", c.conversation.walking_speed_mps, "/conversation");
        read(t, "bookmark_file", c.conversation.bookmark_file, "/conversation");
    }
    if (auto it = doc.find("navigation"); it != doc.end())
    {
        const json& t = *it;
        check_keys(t, "/navigation", {"off_route_budget_m", "capture_radius_m", "verbosity"});
        read(t, "off_route_budget_m", c.conversation.nav.off_route_budget_m, "/navigation");
        read(t, "capture_radius_m", c.conversation.nav.capture_radius_m, "/navigation");
        std::string verbosity = "concise";
        read(t, "verbosity", verbosity, "/navigation");
        c.conversation.nav.verbosity = parse_verbosity(verbosity);
    }
    if (auto it = doc.find("beacon"); it != doc.end())
    {
        const json& t = *it;
        check_keys(t, "/beacon", {"arrival_radius_m", "cue_min_interval_ms"});
        read(t, "arrival_radius_m", c.conversation.beacon.arrival_radius_m, "/beacon");
        read_ms(t, "cue_min_interval_ms", c.conversation.beacon.cue_min_interval, "/beacon");
    }
    read_ms(doc, "busy_tick_interval_ms", c.busy_tick_interval, "");
    read(doc, "preset", c.preset, "");
    read(doc, "announce_streets_during_nav", c.announce_streets_during_nav, "");
    validate(c);
    return c;
}

json to_json(const EngineConfig& c)
{
    return {
        {"tracker",
         {{"collinearity_tolerance_deg", c.tracker.gesture.collinearity_tolerance_deg},
          {"window", c.tracker.window},
          {"capture_radius_m", c.tracker.capture_radius_m},
          {"release_radius_m", c.tracker.release_radius_m},
          {"dwell_ms", c.tracker.dwell_threshold.count()}}},
        {"conversation",
         {{"max_tool_rounds", c.conversation.max_tool_rounds},
          {"near_threshold_m", c.conversation.near_threshold_m},
          {"walking_speed_mps", c.conversation.walking_speed_mps},
          {"bookmark_file", c.conversation.bookmark_file}}},
        {"navigation",
         {{"off_route_budget_m", c.conversation.nav.off_route_budget_m},
          {"capture_radius_m", c.conversation.nav.capture_radius_m},
          {"verbosity", c.conversation.nav.verbosity == spatial::Verbosity::Concise ? "concise" : "accessible"}}},
        {"beacon",
         {{"arrival_radius_m", c.conversation.beacon.arrival_radius_m},
          {"cue_min_interval_ms", c.conversation.beacon.cue_min_interval.count()}}},
        {"busy_tick_interval_ms", c.busy_tick_interval.count()},
        {"preset", c.preset},
        {"announce_streets_during_nav", c.announce_streets_during_nav},
    };
}

void apply_env_overrides(EngineConfig& c, const EnvLookup& env)
{
    const auto number = [&](std::string_view name, auto& out) {
        const auto v = env(name);
        if (!v)
            return;
        try
        {
            std::size_t used = 0;
            const double d = std::stod(*v, &used);
            if (used != v->size())
                throw std::invalid_argument(*v);
            out = static_cast<std::remove_reference_t<decltype(out)>>(d);
        }
        catch (const std::exception&)
        {
            fail(ErrorKind::Validation, fmt::format("{}: expected a number, got \"{}\"", name, *v));
        }
    };
    const auto millis = [&](std::string_view name, Millis& out) {
        long long v = out.count();
        number(name, v);
        out = Millis(v);
    };

    number("MAPIO_GESTURE_TOLERANCE_DEG", c.tracker.gesture.collinearity_tolerance_deg);
    number("MAPIO_WINDOW", c.tracker.window);
    number("MAPIO_CAPTURE_RADIUS_M", c.tracker.capture_radius_m);
    number("MAPIO_RELEASE_RADIUS_M", c.tracker.release_radius_m);
    millis("MAPIO_DWELL_MS", c.tracker.dwell_threshold);
    number("MAPIO_MAX_TOOL_ROUNDS", c.conversation.max_tool_rounds);
    number("MAPIO_NEAR_THRESHOLD_M", c.conversation.near_threshold_m);
    number("MAPIO_WALKING_SPEED_MPS", c.conversation.walking_speed_mps);
    if (auto v = env("MAPIO_BOOKMARK_FILE"))
        c.conversation.bookmark_file = *v;
    number("MAPIO_OFF_ROUTE_BUDGET_M", c.conversation.nav.off_route_budget_m);
    number("MAPIO_NAV_CAPTURE_RADIUS_M", c.conversation.nav.capture_radius_m);
    if (auto v = env("MAPIO_NAV_VERBOSITY"))
        c.conversation.nav.verbosity = parse_verbosity(*v);
    number("MAPIO_ARRIVAL_RADIUS_M", c.conversation.beacon.arrival_radius_m);
    millis("MAPIO_CUE_INTERVAL_MS", c.conversation.beacon.cue_min_interval);
    millis("MAPIO_BUSY_TICK_MS", c.busy_tick_interval);
    number("MAPIO_PRESET", c.preset);
    if (auto v = env("MAPIO_ANNOUNCE_STREETS_DURING_NAV"))
    {
        const auto s = detail::lower(*v);
        if (s != "0" && s != "1" && s != "true" && s != "false")
            fail(ErrorKind::Validation, "MAPIO_ANNOUNCE_STREETS_DURING_NAV: expected true or false");
        c.announce_streets_during_nav = s == "1" || s == "true";
    }
    validate(c);
}

EngineConfig load_config(const std::string& path)
{
    EngineConfig c;
    if (!path.empty())
    {
        std::ifstream in(path);
        if (!in)
            fail(ErrorKind::NotFound, "cannot open config " + path);
        json doc = json::parse(in, nullptr, false, true);
        if (doc.is_discarded())
            fail(ErrorKind::Validation, "config " + path + " is not valid JSON");
        c = config_from_json(doc);
    }
    apply_env_overrides(c, [](std::string_view name) -> std::optional<std::string> {
        if (const char* v = std::getenv(std::string(name).c_str()))
            return std::string(v);
        return std::nullopt;
    });
    return c;
}

} // namespace mapio::service
