// SPDX-License-Identifier: Apache-2.0
#include "mapio/conversation.hpp"

#include "mapio/error.hpp"
#include "json_util.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>

namespace mapio::prompt {

using nlohmann::json;

// ---------------------------------------------------------------------------------------
// Bookmarks

bool BookmarkStore::remember(std::string_view alias, const Poi& poi)
{
    const std::string key = detail::lower(detail::trim(alias));
    if (key.empty())
        fail(ErrorKind::Validation, "bookmark alias must not be empty");
    const bool replaced = _entries.count(key) > 0;
    _entries[key] = poi.id;
    _display[key] = detail::trim(alias);
    return replaced;
}

std::optional<std::string> BookmarkStore::find(std::string_view alias) const
{
    auto it = _entries.find(detail::lower(detail::trim(alias)));
    if (it == _entries.end())
        return std::nullopt;
    return it->second;
}

const Poi& BookmarkStore::resolve(std::string_view alias, const MapModel& model) const
{
    const auto id = find(alias);
    if (!id)
        fail(ErrorKind::NotFound, fmt::format("no bookmark named \"{}\"", alias));
    const Poi* poi = model.find_poi(*id);
    if (!poi)
        fail(ErrorKind::NotFound, fmt::format("bookmark \"{}\" refers to unknown POI {}", alias, *id));
    return *poi;
}

json BookmarkStore::to_json() const
{
    json entries = json::array();
    for (const auto& [key, id] : _entries)
        entries.push_back({{"alias", _display.at(key)}, {"poi", id}});
    return {{"version", 1}, {"bookmarks", entries}};
}

BookmarkStore BookmarkStore::from_json(const json& doc)
{
    BookmarkStore store;
    const auto& list = detail::as_array(detail::require(doc, "bookmarks", ""), "/bookmarks");
    for (std::size_t i = 0; i < list.size(); ++i)
    {
        const auto path = detail::child("/bookmarks", i);
        const auto alias = detail::as_string(detail::require(list[i], "alias", path), detail::child(path, "alias"));
        const auto id = detail::as_string(detail::require(list[i], "poi", path), detail::child(path, "poi"));
        const std::string key = detail::lower(detail::trim(alias));
        if (store._entries.count(key))
            detail::schema_error(path, "duplicate alias \"" + alias + "\"");
        store._entries[key] = id;
        store._display[key] = detail::trim(alias);
    }
    return store;
}

void BookmarkStore::save(const std::string& path) const
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out)
            fail(ErrorKind::Runtime, "cannot write bookmarks to " + path);
        out << to_json().dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

BookmarkStore BookmarkStore::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        return {};
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded())
        fail(ErrorKind::Validation, "bookmark file " + path + " is not valid JSON");
    return from_json(doc);
}

// ---------------------------------------------------------------------------------------
// Tool dispatch

namespace {

json projection_json(const spatial::EdgeProjection& p)
{
    return {{"edge_id", p.edge_id},
            {"street_name", p.street_name},
            {"point", detail::point_json(p.point)},
            {"dist_from_n1_m", p.dist_from_n1_m},
            {"dist_from_n2_m", p.dist_from_n2_m},
            {"distance_m", p.distance_m}};
}

json poi_json(const Poi& poi)
{
    return {{"poi_id", poi.id}, {"name", poi.name}};
}

const json& arg(const json& args, std::string_view key)
{
    auto it = args.find(key);
    if (it == args.end() || it->is_null())
        fail(ErrorKind::Validation, fmt::format("missing argument \"{}\"", key));
    return *it;
}

double number_arg(const json& args, std::string_view key, double fallback)
{
    auto it = args.find(key);
    if (it == args.end() || it->is_null())
        return fallback;
    if (!it->is_number())
        fail(ErrorKind::Validation, fmt::format("argument \"{}\" must be a number", key));
    return it->get<double>();
}

bool bool_arg(const json& args, std::string_view key)
{
    auto it = args.find(key);
    if (it == args.end() || it->is_null())
        return false;
    if (!it->is_boolean())
        fail(ErrorKind::Validation, fmt::format("argument \"{}\" must be a boolean", key));
    return it->get<bool>();
}

std::string string_arg(const json& args, std::string_view key)
{
    const json& v = arg(args, key);
    if (!v.is_string())
        fail(ErrorKind::Validation, fmt::format("argument \"{}\" must be a string", key));
    return v.get<std::string>();
}

} // namespace

ToolDispatcher::ToolDispatcher(const MapModel& model, const Preset& preset, const ConversationConfig& config):
    _model(model), _preset(preset), _config(config), _catalog(tool_catalog(preset))
{
}

bool ToolDispatcher::has_tool(std::string_view name) const
{
    for (const auto& t : _catalog)
    {
        if (t.at("name").get<std::string>() == name)
            return true;
    }
    return false;
}

const Poi& ToolDispatcher::resolve_poi(const json& a, const SessionEffects& effects) const
{
    std::string key;
    if (a.is_string())
        key = a.get<std::string>();
    else if (a.is_object() && a.contains("poi") && a["poi"].is_string())
        key = a["poi"].get<std::string>();
    else if (a.is_object() && a.contains("bookmark") && a["bookmark"].is_string())
        return effects.bookmarks.resolve(a["bookmark"].get<std::string>(), _model);
    else
        fail(ErrorKind::Validation, "expected a POI id, name or bookmark");

    if (const Poi* p = _model.find_poi(key))
        return *p;
    if (const Poi* p = _model.find_poi_by_name(key))
        return *p;
    if (const auto id = effects.bookmarks.find(key))
        return _model.poi(*id);
    fail(ErrorKind::NotFound, fmt::format("unknown POI \"{}\"", key));
}

spatial::Endpoint ToolDispatcher::resolve_endpoint(const json& a, const std::optional<Point2D>& here,
                                                   const SessionEffects& effects) const
{
    const auto pointed = [&]() -> spatial::Endpoint {
        if (!here)
            fail(ErrorKind::Validation, "the user is not pointing at the map");
        return *here;
    };
    if (a.is_string())
    {
        if (detail::lower(a.get<std::string>()) == "here")
            return pointed();
        return spatial::PoiRef{resolve_poi(a, effects).id};
    }
    if (!a.is_object())
        fail(ErrorKind::Validation, "expected a location object or a POI name");
    if (a.contains("x") || a.contains("y"))
    {
        if (!a.contains("x") || !a.contains("y") || !a["x"].is_number() || !a["y"].is_number())
            fail(ErrorKind::Validation, "a point needs numeric \"x\" and \"y\"");
        Point2D p{a["x"].get<double>(), a["y"].get<double>()};
        if (!is_finite(p))
            fail(ErrorKind::Validation, "point coordinates must be finite");
        return p;
    }
    if (a.contains("node"))
    {
        const auto id = a["node"].is_string() ? a["node"].get<std::string>() : std::string();
        if (!_model.find_node(id))
            fail(ErrorKind::NotFound, fmt::format("unknown node \"{}\"", id));
        return spatial::NodeRef{id};
    }
    if (a.contains("poi") || a.contains("bookmark"))
        return spatial::PoiRef{resolve_poi(a, effects).id};
    if (a.value("here", false))
        return pointed();
    fail(ErrorKind::Validation, "unrecognised location");
}

json ToolDispatcher::dispatch(const ToolCall& call, const std::optional<Point2D>& here, SessionEffects& effects) const
{
    if (!has_tool(call.name))
        fail(ErrorKind::NotFound, fmt::format("unknown tool \"{}\"", call.name));
    const json& a = call.arguments;
    const auto position = [&](std::string_view key) {
        return spatial::position_of(resolve_endpoint(arg(a, key), here, effects), _model);
    };

    try
    {
        if (call.name == "distance")
        {
            const auto from = resolve_endpoint(arg(a, "from"), here, effects);
            const auto to = resolve_endpoint(arg(a, "to"), here, effects);
            json r = {{"distance_m",
                       spatial::distance(spatial::position_of(from, _model), spatial::position_of(to, _model))}};
            if (bool_arg(a, "walking_time"))
            {
                const auto route = spatial::shortest_route(from, to, _model);
                const double t = spatial::walking_time_s(route.total_length_m, _config.walking_speed_mps);
                r["walking_distance_m"] = route.total_length_m;
                r["walking_time_s"] = t;
                r["walking_time"] = spatial::format_duration(t);
            }
            return r;
        }
        if (call.name == "is_near")
        {
            const Point2D p = position("position");
            const Poi& poi = resolve_poi(arg(a, "poi"), effects);
            const double threshold = number_arg(a, "threshold_m", _config.near_threshold_m);
            return {{"near", spatial::is_near(p, poi, threshold)},
                    {"distance_m", spatial::distance(p, poi)},
                    {"threshold_m", threshold},
                    {"poi_id", poi.id}};
        }
        if (call.name == "pois_near")
        {
            const Point2D p = position("position");
            const double radius = number_arg(a, "radius_m", _config.near_threshold_m);
            if (!(radius >= 0.0))
                fail(ErrorKind::Validation, "radius_m must be non-negative");
            json list = json::array();
            for (const auto& d : spatial::pois_near(p, radius, _model))
                list.push_back({{"poi_id", d.poi->id}, {"name", d.poi->name}, {"distance_m", d.distance_m}});
            return {{"pois", list}};
        }
        if (call.name == "closest_edge")
            return projection_json(spatial::closest_edge(position("position"), _model));
        if (call.name == "get_route")
        {
            const auto from = resolve_endpoint(arg(a, "from"), here, effects);
            const auto to = resolve_endpoint(arg(a, "to"), here, effects);
            const auto route = spatial::shortest_route(from, to, _model);
            const auto verbosity = bool_arg(a, "accessible") ? spatial::Verbosity::Accessible : spatial::Verbosity::Concise;
            json steps = json::array();
            for (const auto& ins : spatial::route_instructions(route, _model, verbosity))
                steps.push_back(ins.text);
            json r = {{"instructions", steps}, {"total_length_m", route.total_length_m}, {"blocks", route.block_count()}};
            if (bool_arg(a, "walking_time"))
            {
                const double t = spatial::walking_time_s(route.total_length_m, _config.walking_speed_mps);
                r["walking_time_s"] = t;
                r["walking_time"] = spatial::format_duration(t);
            }
            return r;
        }
        if (call.name == "make_poi_discoverable")
        {
            const Poi& poi = resolve_poi(arg(a, "poi"), effects);
            const bool already = poi.discoverable || effects.discovered.count(poi.id) > 0;
            effects.discovered.insert(poi.id);
            json r = poi_json(poi);
            r["discoverable"] = true;
            r["already_discoverable"] = already;
            return r;
        }
        if (call.name == "remember_bookmark")
        {
            const std::string alias = string_arg(a, "alias");
            const Poi& poi = resolve_poi(arg(a, "poi"), effects);
            const auto previous = effects.bookmarks.find(alias);
            const bool replaced = effects.bookmarks.remember(alias, poi);
            if (!_config.bookmark_file.empty())
                effects.bookmarks.save(_config.bookmark_file);
            json r = poi_json(poi);
            r["alias"] = detail::trim(alias);
            r["replaced"] = replaced;
            if (replaced)
                r["notice"] = fmt::format("\"{}\" previously referred to {}", detail::trim(alias),
                                          _model.poi(*previous).name);
            return r;
        }
        if (call.name == "resolve_bookmark")
        {
            const std::string alias = string_arg(a, "alias");
            const Poi& poi = effects.bookmarks.resolve(alias, _model);
            json r = poi_json(poi);
            r["alias"] = detail::trim(alias);
            r["position"] = detail::point_json(poi.position);
            r["address"] = poi.address;
            return r;
        }
        if (call.name == "start_street_navigation")
        {
            const auto to = resolve_endpoint(arg(a, "to"), here, effects);
            Point2D from;
            if (a.contains("from") && !a["from"].is_null())
                from = position("from");
            else if (here)
                from = *here;
            else
                fail(ErrorKind::Validation, "the user is not pointing at the map and no origin was given");
            auto start = nav::start_street_nav(from, to, _model, _config.nav);
            json r = {{"mode", "street_by_street"},
                      {"target", start.session.target_name},
                      {"steps", start.session.instructions.size()},
                      {"total_length_m", start.session.route.total_length_m}};
            r["first_instruction"] = start.first ? json(start.first->text) : json(nullptr);
            r["arrived"] = !start.first.has_value();
            effects.guidance = std::move(start);
            return r;
        }
        if (call.name == "start_fly_me_there")
        {
            const auto to = resolve_endpoint(arg(a, "to"), here, effects);
            auto session = nav::start_flyme(to, _model, _config.beacon);
            json r = {{"mode", "fly_me_there"}, {"target", session.target_name}};
            if (here)
                r["distance_m"] = spatial::distance(*here, session.target);
            effects.guidance = std::move(session);
            return r;
        }
    }
    catch (const Error& e)
    {
        return {{"error", e.what()}};
    }
    fail(ErrorKind::NotFound, fmt::format("unknown tool \"{}\"", call.name));
}

// ---------------------------------------------------------------------------------------
// Conversation loop

Conversation::Conversation(std::shared_ptr<const MapModel> model, int preset_iteration,
                           std::shared_ptr<ChatBackend> backend, ConversationConfig config):
    _model(std::move(model)),
    _preset(prompt::preset(preset_iteration)),
    _backend(std::move(backend)),
    _config(std::move(config)),
    _system(build_system_instructions(*_model, preset_iteration)),
    _dispatcher(*_model, _preset, _config)
{
    if (!_backend)
        fail(ErrorKind::Validation, "conversation needs a chat backend");
    if (_config.max_tool_rounds < 0)
        fail(ErrorKind::Validation, "max_tool_rounds must be non-negative");
    if (!_config.bookmark_file.empty())
        _effects.bookmarks = BookmarkStore::load(_config.bookmark_file);
}

TurnResult Conversation::converse(std::string_view user_text, const std::optional<Point2D>& pointed,
                                  const WallTime& now)
{
    const auto pcd = generate_pcd(pointed, *_model, now, _preset);
    const auto prompt = combine(user_text, pcd.text);

    const std::size_t rollback = _history.size();
    _effects.guidance.reset();

    TurnResult result;
    json steps = json::array();
    _history.push_back({Role::User, prompt.text, std::nullopt, {}});

    try
    {
        ChatRequest request;
        request.system = _system.text;
        request.tools = _dispatcher.catalog();
        for (;;)
        {
            request.messages = _history;
            ChatResponse response = _backend->complete(request);
            result.latency += response.latency;
            if (response.answer)
            {
                result.answer = *response.answer;
                _history.push_back({Role::Assistant, result.answer, std::nullopt, {}});
                break;
            }
            if (!response.tool_call)
                fail(ErrorKind::Backend, "backend returned neither an answer nor a tool call");
            if (static_cast<int>(result.tool_rounds) >= _config.max_tool_rounds)
                fail(ErrorKind::Runtime,
                     fmt::format("tool-round limit of {} reached without a final answer", _config.max_tool_rounds));
            ToolCall call = std::move(*response.tool_call);
            if (call.id.empty())
                call.id = fmt::format("call_{}", result.tool_rounds);
            const json output = _dispatcher.dispatch(call, pointed, _effects);
            ++result.tool_rounds;
            steps.push_back({{"tool_call", {{"name", call.name}, {"arguments", call.arguments}}}, {"result", output}});
            _history.push_back({Role::Assistant, {}, call, {}});
            _history.push_back({Role::Tool, output.dump(), std::nullopt, call.id});
        }
    }
    catch (...)
    {
        _history.resize(rollback);
        _effects.guidance.reset();
        throw;
    }

    result.guidance = _effects.guidance;
    result.transcript = {{"preset", _preset.iteration},
                         {"system_hash", _system.hash()},
                         {"prompt", prompt.text},
                         {"steps", steps},
                         {"answer", result.answer},
                         {"tool_rounds", result.tool_rounds},
                         {"latency_ms", result.latency.count()}};
    return result;
}

// ---------------------------------------------------------------------------------------
// Heuristic pre-labels

namespace {

std::string normalise(std::string_view s)
{
    std::string out;
    bool space = false;
    for (unsigned char c : s)
    {
        if (std::isspace(c))
        {
            space = !out.empty();
            continue;
        }
        if (space)
            out += ' ';
        space = false;
        out += static_cast<char>(std::tolower(c));
    }
    return out;
}

std::set<std::string> numbers_in(std::string_view s)
{
    static const std::regex number(R"(\d+(?:[.,]\d+)?)");
    std::set<std::string> out;
    const std::string text(s);
    for (auto it = std::sregex_iterator(text.begin(), text.end(), number); it != std::sregex_iterator(); ++it)
    {
        std::string n = it->str();
        std::replace(n.begin(), n.end(), ',', '.');
        out.insert(n);
    }
    return out;
}

} // namespace

HeuristicVerdict classify_heuristic(std::string_view answer, std::string_view expected)
{
    const std::string a = normalise(answer);
    const std::string e = normalise(expected);
    if (a.empty())
        return {Label::NotReplying, false, "empty answer"};
    if (!e.empty() && a.find(e) != std::string::npos)
        return {Label::Correct, false, "answer contains the expected answer"};

    const auto expected_numbers = numbers_in(e);
    const auto answer_numbers = numbers_in(a);
    if (!expected_numbers.empty() && !answer_numbers.empty())
    {
        bool all_present = true;
        for (const auto& n : expected_numbers)
            all_present = all_present && answer_numbers.count(n) > 0;
        if (!all_present)
            return {Label::BlatantlyWrong, true, "answer states numbers that differ from the expected answer"};
        return {Label::PartialIncomplete, true, "numbers match but the wording differs"};
    }
    return {Label::PartialIncomplete, true, "no containment match"};
}

} // namespace mapio::prompt
