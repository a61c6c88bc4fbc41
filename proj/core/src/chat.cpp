// SPDX-License-Identifier: Apache-2.0
#include "mapio/chat.hpp"

#include "mapio/error.hpp"

#include <fmt/format.h>

#include <cstdlib>
#include <fstream>
#include <regex>

#ifdef MAPIO_WITH_TLS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#endif

namespace mapio::prompt {

using nlohmann::json;

namespace {

/// Tool results of the current turn, in call order, parsed from the request history.
std::vector<json> turn_tool_results(const ChatRequest& request)
{
    std::vector<json> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < request.messages.size(); ++i)
    {
        if (request.messages[i].role == Role::User)
            start = i;
    }
    for (std::size_t i = start; i < request.messages.size(); ++i)
    {
        const auto& m = request.messages[i];
        if (m.role != Role::Tool)
            continue;
        out.push_back(json::parse(m.content, nullptr, false));
    }
    return out;
}

std::string render_value(const json& v)
{
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_number_float())
    {
        const double d = v.get<double>();
        if (d == static_cast<double>(static_cast<long long>(d)))
            return std::to_string(static_cast<long long>(d));
        return fmt::format("{:.1f}", d);
    }
    return v.dump();
}

std::string expand(const std::string& text, const std::vector<json>& results)
{
    static const std::regex placeholder(R"(\$\{(\d+)\.([A-Za-z0-9_./]+)\})");
    std::string out;
    auto begin = std::sregex_iterator(text.begin(), text.end(), placeholder);
    std::size_t last = 0;
    for (auto it = begin; it != std::sregex_iterator(); ++it)
    {
        const auto& m = *it;
        out.append(text, last, static_cast<std::size_t>(m.position()) - last);
        last = static_cast<std::size_t>(m.position() + m.length());
        const auto index = std::stoul(m[1].str());
        if (index >= results.size())
            fail(ErrorKind::Backend, fmt::format("script refers to tool result {} which does not exist", index));
        std::string path = m[2].str();
        for (auto& c : path)
        {
            if (c == '.')
                c = '/';
        }
        const json::json_pointer ptr("/" + path);
        if (!results[index].contains(ptr))
            fail(ErrorKind::Backend, fmt::format("tool result {} has no field {}", index, m[2].str()));
        out += render_value(results[index].at(ptr));
    }
    out.append(text, last);
    return out;
}

std::string_view role_name(Role r)
{
    switch (r)
    {
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
        case Role::Tool: return "tool";
    }
    return "user";
}

} // namespace

ScriptedBackend::ScriptedBackend(json script): _script(std::move(script))
{
    if (!_script.is_object() || !_script.contains("turns") || !_script["turns"].is_array())
        fail(ErrorKind::Validation, "script: expected an object with a \"turns\" array");
    if (_script.value("version", 1) != 1)
        fail(ErrorKind::Validation, "script: unsupported version");
    for (const auto& turn : _script["turns"])
    {
        if (!turn.contains("steps") || !turn["steps"].is_array() || turn["steps"].empty())
            fail(ErrorKind::Validation, "script: every turn needs a non-empty \"steps\" array");
        for (const auto& step : turn["steps"])
        {
            if (!step.contains("answer") && !step.contains("tool_call") && !step.contains("fail"))
                fail(ErrorKind::Validation, "script: a step needs \"answer\", \"tool_call\" or \"fail\"");
        }
    }
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::NotFound, "cannot open script " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded())
        fail(ErrorKind::Validation, "script " + path + " is not valid JSON");
    return std::make_shared<ScriptedBackend>(std::move(doc));
}

void ScriptedBackend::select_turn(std::string_view id)
{
    const auto& turns = _script["turns"];
    for (std::size_t i = 0; i < turns.size(); ++i)
    {
        if (turns[i].value("id", std::string()) == id)
        {
            _turn = i;
            _step = 0;
            return;
        }
    }
    fail(ErrorKind::NotFound, fmt::format("script has no turn \"{}\"", id));
}

bool ScriptedBackend::has_turn(std::string_view id) const
{
    for (const auto& t : _script["turns"])
    {
        if (t.value("id", std::string()) == id)
            return true;
    }
    return false;
}

ChatResponse ScriptedBackend::complete(const ChatRequest& request)
{
    count_call();
    const auto& turns = _script["turns"];
    if (_turn >= turns.size())
        fail(ErrorKind::Backend, "script exhausted");
    const auto& steps = turns[_turn]["steps"];
    if (_step >= steps.size())
        fail(ErrorKind::Backend, "script turn ended without an answer");
    const json& step = steps[_step++];

    ChatResponse r;
    r.latency = Millis(step.value("latency_ms", 0));
    if (step.contains("fail"))
    {
        ++_turn;
        _step = 0;
        fail(ErrorKind::Backend, step["fail"].get<std::string>());
    }
    if (step.contains("tool_call"))
    {
        const auto& tc = step["tool_call"];
        ToolCall call;
        call.name = tc.at("name").get<std::string>();
        call.arguments = tc.value("arguments", json::object());
        call.id = fmt::format("call_{}_{}", _turn, _step - 1);
        r.tool_call = std::move(call);
        return r;
    }
    r.answer = expand(step["answer"].get<std::string>(), turn_tool_results(request));
    ++_turn;
    _step = 0;
    return r;
}

json to_chat_completions(const ChatRequest& request, std::string_view model)
{
    json messages = json::array();
    messages.push_back({{"role", "system"}, {"content", request.system}});
    for (const auto& m : request.messages)
    {
        json msg = {{"role", role_name(m.role)}};
        if (m.role == Role::Assistant && m.tool_call)
        {
            msg["content"] = nullptr;
            msg["tool_calls"] = json::array({{{"id", m.tool_call->id},
                                              {"type", "function"},
                                              {"function",
                                               {{"name", m.tool_call->name},
                                                {"arguments", m.tool_call->arguments.dump()}}}}});
        }
        else
        {
            msg["content"] = m.content;
        }
        if (m.role == Role::Tool)
            msg["tool_call_id"] = m.tool_call_id;
        messages.push_back(std::move(msg));
    }
    json body = {{"model", std::string(model)}, {"messages", std::move(messages)}};
    if (!request.tools.empty())
    {
        json tools = json::array();
        for (const auto& t : request.tools)
            tools.push_back({{"type", "function"}, {"function", t}});
        body["tools"] = std::move(tools);
    }
    return body;
}

ChatResponse from_chat_completions(const json& body)
{
    if (!body.contains("choices") || !body["choices"].is_array() || body["choices"].empty())
        fail(ErrorKind::Backend, "chat completion response has no choices");
    const json& msg = body["choices"][0].at("message");
    ChatResponse r;
    if (msg.contains("tool_calls") && msg["tool_calls"].is_array() && !msg["tool_calls"].empty())
    {
        const json& tc = msg["tool_calls"][0];
        ToolCall call;
        call.id = tc.value("id", std::string());
        call.name = tc.at("function").at("name").get<std::string>();
        const std::string args = tc["function"].value("arguments", std::string("{}"));
        call.arguments = json::parse(args, nullptr, false);
        if (call.arguments.is_discarded())
            fail(ErrorKind::Backend, "tool call arguments are not valid JSON");
        r.tool_call = std::move(call);
        return r;
    }
    if (!msg.contains("content") || !msg["content"].is_string())
        fail(ErrorKind::Backend, "chat completion message has no content");
    r.answer = msg["content"].get<std::string>();
    return r;
}

#ifdef MAPIO_WITH_TLS

namespace {

class LiveBackend final : public ChatBackend
{
public:
    explicit LiveBackend(LiveBackendConfig config): _config(std::move(config)) {}

    ChatResponse complete(const ChatRequest& request) override
    {
        count_call();
        httplib::Client client(_config.base_url);
        client.set_read_timeout(_config.timeout_s, 0);
        client.set_bearer_token_auth(_config.api_key);
        const auto started = std::chrono::steady_clock::now();
        auto res = client.Post("/v1/chat/completions", to_chat_completions(request, _config.model).dump(),
                               "application/json");
        if (!res)
            fail(ErrorKind::Backend, "chat backend unreachable: " + httplib::to_string(res.error()));
        if (res->status != 200)
            fail(ErrorKind::Backend, fmt::format("chat backend returned HTTP {}", res->status));
        json body = json::parse(res->body, nullptr, false);
        if (body.is_discarded())
            fail(ErrorKind::Backend, "chat backend returned invalid JSON");
        ChatResponse r = from_chat_completions(body);
        r.latency = std::chrono::duration_cast<Millis>(std::chrono::steady_clock::now() - started);
        return r;
    }

private:
    LiveBackendConfig _config;
};

} // namespace

bool live_backend_available()
{
    return true;
}

std::shared_ptr<ChatBackend> make_live_backend(LiveBackendConfig config)
{
    if (config.api_key.empty())
    {
        if (const char* key = std::getenv("OPENAI_API_KEY"))
            config.api_key = key;
    }
    if (config.api_key.empty())
        fail(ErrorKind::Validation, "live backend needs an API key (OPENAI_API_KEY)");
    return std::make_shared<LiveBackend>(std::move(config));
}

#else

bool live_backend_available()
{
    return false;
}

std::shared_ptr<ChatBackend> make_live_backend(LiveBackendConfig)
{
    fail(ErrorKind::Runtime, "this build has no TLS support; the live backend is unavailable");
}

#endif

} // namespace mapio::prompt
