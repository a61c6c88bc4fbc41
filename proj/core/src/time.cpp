// SPDX-License-Identifier: Apache-2.0
#include "mapio/time.hpp"

#include "mapio/error.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <array>

namespace mapio {

namespace {

constexpr std::array<std::string_view, 7> kNames = {"Monday", "Tuesday",  "Wednesday", "Thursday",
                                                    "Friday", "Saturday", "Sunday"};
constexpr std::array<std::string_view, 7> kKeys = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};

} // namespace

std::string_view weekday_name(Weekday d)
{
    return kNames[static_cast<std::size_t>(d)];
}

std::string_view weekday_key(Weekday d)
{
    return kKeys[static_cast<std::size_t>(d)];
}

Weekday parse_weekday(std::string_view text)
{
    const auto key = detail::lower(text);
    for (std::size_t i = 0; i < kKeys.size(); ++i)
    {
        if (key == kKeys[i] || key == detail::lower(kNames[i]))
            return static_cast<Weekday>(i);
    }
    fail(ErrorKind::Validation, "unknown weekday '" + std::string(text) + "'");
}

int parse_clock(std::string_view hhmm)
{
    const auto colon = hhmm.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon > 2 || hhmm.size() - colon != 3)
        fail(ErrorKind::Validation, "expected HH:MM, got '" + std::string(hhmm) + "'");
    int h = 0;
    int m = 0;
    for (char c : hhmm.substr(0, colon))
    {
        if (c < '0' || c > '9')
            fail(ErrorKind::Validation, "expected HH:MM, got '" + std::string(hhmm) + "'");
        h = h * 10 + (c - '0');
    }
    for (char c : hhmm.substr(colon + 1))
    {
        if (c < '0' || c > '9')
            fail(ErrorKind::Validation, "expected HH:MM, got '" + std::string(hhmm) + "'");
        m = m * 10 + (c - '0');
    }
    if (m > 59 || h > 24 || (h == 24 && m != 0))
        fail(ErrorKind::Validation, "clock time out of range: '" + std::string(hhmm) + "'");
    return h * 60 + m;
}

std::string format_clock(int minute)
{
    return fmt::format("{:02d}:{:02d}", minute / 60, minute % 60);
}

WallTime parse_wall_time(std::string_view text)
{
    const auto parts = detail::split_ws(text);
    if (parts.size() != 2)
        fail(ErrorKind::Validation, "expected '<weekday> HH:MM', got '" + std::string(text) + "'");
    WallTime t{parse_weekday(parts[0]), parse_clock(parts[1])};
    if (t.minute >= kMinutesPerDay)
        fail(ErrorKind::Validation, "time of day must be before 24:00");
    return t;
}

std::string format_wall_time(const WallTime& t)
{
    return fmt::format("{} {}", weekday_name(t.day), format_clock(t.minute));
}

bool OpeningHours::is_open(const WallTime& t) const
{
    for (const auto& iv : days[static_cast<std::size_t>(t.day)])
    {
        if (t.minute >= iv.start && t.minute < iv.end)
            return true;
    }
    return false;
}

bool OpeningHours::empty() const
{
    for (const auto& d : days)
    {
        if (!d.empty())
            return false;
    }
    return true;
}

std::string OpeningHours::describe() const
{
    if (empty())
        return "not available";
    std::string out;
    for (std::size_t i = 0; i < days.size(); ++i)
    {
        if (i)
            out += "; ";
        out += kNames[i].substr(0, 3);
        if (days[i].empty())
        {
            out += " closed";
            continue;
        }
        for (std::size_t k = 0; k < days[i].size(); ++k)
            out += fmt::format("{}{}-{}", k ? ", " : " ", format_clock(days[i][k].start), format_clock(days[i][k].end));
    }
    return out;
}

} // namespace mapio
