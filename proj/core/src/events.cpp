// SPDX-License-Identifier: Apache-2.0
#include "mapio/service.hpp"

#include <algorithm>

namespace mapio::service {

using nlohmann::json;

std::string_view to_string(WireType t)
{
    switch (t)
    {
        case WireType::Enter: return "ENTER";
        case WireType::Leave: return "LEAVE";
        case WireType::Dwell: return "DWELL";
        case WireType::AmbientOn: return "AMBIENT_ON";
        case WireType::AmbientOff: return "AMBIENT_OFF";
        case WireType::BusyTick: return "BUSY_TICK";
        case WireType::Answer: return "ANSWER";
        case WireType::NavStep: return "NAV_STEP";
        case WireType::NavReroute: return "NAV_REROUTE";
        case WireType::NavArrived: return "NAV_ARRIVED";
        case WireType::BeaconCue: return "BEACON_CUE";
        case WireType::BeaconArrived: return "BEACON_ARRIVED";
        case WireType::Error: return "ERROR";
    }
    return "ERROR";
}

json WireEvent::to_json() const
{
    return {{"seq", seq}, {"type", to_string(type)}, {"payload", payload}};
}

std::string WireEvent::to_json_line() const
{
    return to_json().dump();
}

std::string to_json_lines(std::span<const WireEvent> events)
{
    std::string out;
    for (const auto& e : events)
        out += e.to_json_line() + "\n";
    return out;
}

WireEvent EventBus::publish(WireType type, json payload)
{
    std::vector<Subscriber> subscribers;
    WireEvent event;
    {
        std::lock_guard lock(_mutex);
        event.seq = _log.empty() ? 1 : _log.back().seq + 1;
        event.type = type;
        event.payload = std::move(payload);
        _log.push_back(event);
        for (const auto& [_, s] : _subscribers)
            subscribers.push_back(s);
    }
    _cv.notify_all();
    for (const auto& s : subscribers)
        s(event);
    return event;
}

std::size_t EventBus::subscribe(Subscriber s)
{
    std::lock_guard lock(_mutex);
    _subscribers.emplace_back(_next_subscriber, std::move(s));
    return _next_subscriber++;
}

void EventBus::unsubscribe(std::size_t id)
{
    std::lock_guard lock(_mutex);
    std::erase_if(_subscribers, [id](const auto& p) { return p.first == id; });
}

std::vector<WireEvent> EventBus::since(std::uint64_t seq) const
{
    std::lock_guard lock(_mutex);
    std::vector<WireEvent> out;
    for (const auto& e : _log)
    {
        if (e.seq > seq)
            out.push_back(e);
    }
    return out;
}

std::vector<WireEvent> EventBus::wait_since(std::uint64_t seq, std::chrono::milliseconds timeout) const
{
    {
        std::unique_lock lock(_mutex);
        _cv.wait_for(lock, timeout, [&] { return !_log.empty() && _log.back().seq > seq; });
    }
    return since(seq);
}

std::uint64_t EventBus::last_seq() const
{
    std::lock_guard lock(_mutex);
    return _log.empty() ? 0 : _log.back().seq;
}

} // namespace mapio::service
