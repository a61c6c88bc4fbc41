// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mapio/time.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mapio::prompt {

struct ToolCall
{
    std::string id;
    std::string name;
    nlohmann::json arguments = nlohmann::json::object();
};

enum class Role { User, Assistant, Tool };

struct ChatMessage
{
    Role role = Role::User;
    std::string content;
    std::optional<ToolCall> tool_call; // assistant messages that requested a tool
    std::string tool_call_id;          // tool messages
};

struct ChatRequest
{
    std::string system;
    std::vector<ChatMessage> messages;
    nlohmann::json tools = nlohmann::json::array();
};

/// Either a final answer or a single tool-call request.
struct ChatResponse
{
    std::optional<std::string> answer;
    std::optional<ToolCall> tool_call;
    Millis latency{0}; // simulated or measured time spent producing the response
};

class ChatBackend
{
public:
    virtual ~ChatBackend() = default;

    /// Throws Error(Backend) on failure.
    virtual ChatResponse complete(const ChatRequest& request) = 0;

    std::size_t calls() const { return _calls.load(); }

protected:
    void count_call() { ++_calls; }

private:
    std::atomic<std::size_t> _calls{0};
};

/// Replays a script document:
///
///   {"version": 1, "turns": [{"id": "q01", "steps": [
///       {"tool_call": {"name": "distance", "arguments": {...}}, "latency_ms": 800},
///       {"answer": "It is ${0.distance_m} meters away."}]}]}
///
/// Each `complete` consumes the next step of the current turn; a turn ends with its
/// answer step. `${N.path}` in answers expands to field `path` of the N-th tool result of
/// the turn. A `{"fail": "message"}` step raises a backend error.
class ScriptedBackend final : public ChatBackend
{
public:
    explicit ScriptedBackend(nlohmann::json script);
    static std::shared_ptr<ScriptedBackend> from_file(const std::string& path);

    ChatResponse complete(const ChatRequest& request) override;

    /// Restricts the backend to the turn with this id (benchmark runs).
    void select_turn(std::string_view id);
    bool has_turn(std::string_view id) const;
    const nlohmann::json& script() const { return _script; }

private:
    nlohmann::json _script;
    std::size_t _turn = 0;
    std::size_t _step = 0;
};

/// Adapter for a hosted chat-completions endpoint (OpenAI-compatible). Only available
/// when built with TLS support.
struct LiveBackendConfig
{
    std::string base_url = "https://api.openai.com";
    std::string model = "gpt-4o";
    std::string api_key; // defaults to $OPENAI_API_KEY
    int timeout_s = 60;
};

bool live_backend_available();
std::shared_ptr<ChatBackend> make_live_backend(LiveBackendConfig config);

/// Translation of a request to the chat-completions wire format, exposed for tests.
nlohmann::json to_chat_completions(const ChatRequest& request, std::string_view model);
ChatResponse from_chat_completions(const nlohmann::json& body);

} // namespace mapio::prompt
