// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <chrono>
#include <string>
#include <string_view>
#include <vector>

namespace mapio {

/// Monotonic milliseconds; simulated in replay and tests.
using Millis = std::chrono::milliseconds;

enum class Weekday { Monday, Tuesday, Wednesday, Thursday, Friday, Saturday, Sunday };

inline constexpr int kMinutesPerDay = 24 * 60;

/// Day of week plus minute of day. Always passed explicitly, never read from the system clock.
struct WallTime
{
    Weekday day = Weekday::Monday;
    int minute = 0; // 0..1439

    friend bool operator==(const WallTime&, const WallTime&) = default;
};

/// Accepts "Monday 22:00", "mon 22:00" or "Mon 9:05".
WallTime parse_wall_time(std::string_view text);
std::string format_wall_time(const WallTime& t); // "Monday 22:00"
std::string format_clock(int minute);            // "22:00"
int parse_clock(std::string_view hhmm);          // "22:00" -> 1320, accepts "24:00"

std::string_view weekday_name(Weekday d);
std::string_view weekday_key(Weekday d); // "mon"
Weekday parse_weekday(std::string_view text);

/// Half-open interval [start, end) in minutes of one day; end may be 1440 (midnight).
struct MinuteInterval
{
    int start = 0;
    int end = 0;

    friend bool operator==(const MinuteInterval&, const MinuteInterval&) = default;
};

/// Weekly opening hours. Intervals crossing midnight are stored split at 00:00.
struct OpeningHours
{
    std::array<std::vector<MinuteInterval>, 7> days;

    bool is_open(const WallTime& t) const;
    bool empty() const;
    /// "Mon 09:00-21:00; Tue closed; ..." or "not available".
    std::string describe() const;

    friend bool operator==(const OpeningHours&, const OpeningHours&) = default;
};

} // namespace mapio
