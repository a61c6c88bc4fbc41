// SPDX-License-Identifier: Apache-2.0
#include "mapio/error.hpp"
#include "mapio/label.hpp"
#include "mapio/time.hpp"

#include <gtest/gtest.h>

using namespace mapio;

TEST(WallTime, ParsesDayAndClock)
{
    EXPECT_EQ(parse_wall_time("Monday 22:00"), (WallTime{Weekday::Monday, 1320}));
    EXPECT_EQ(parse_wall_time("sun 9:05"), (WallTime{Weekday::Sunday, 545}));
    EXPECT_EQ(format_wall_time({Weekday::Friday, 61}), "Friday 01:01");
    EXPECT_THROW(parse_wall_time("Someday 10:00"), Error);
    EXPECT_THROW(parse_wall_time("Monday 25:00"), Error);
}

TEST(WallTime, ClockAcceptsMidnightEnd)
{
    EXPECT_EQ(parse_clock("24:00"), 1440);
    EXPECT_EQ(parse_clock("00:00"), 0);
    EXPECT_EQ(format_clock(1320), "22:00");
    EXPECT_THROW(parse_clock("12:60"), Error);
    EXPECT_THROW(parse_clock("noon"), Error);
}

TEST(OpeningHours, HalfOpenIntervals)
{
    OpeningHours h;
    h.days[0] = {{480, 1320}};
    EXPECT_TRUE(h.is_open({Weekday::Monday, 480}));
    EXPECT_TRUE(h.is_open({Weekday::Monday, 1319}));
    EXPECT_FALSE(h.is_open({Weekday::Monday, 1320}));
    EXPECT_FALSE(h.is_open({Weekday::Tuesday, 600}));
    EXPECT_FALSE(h.empty());
    EXPECT_TRUE(OpeningHours{}.empty());
    EXPECT_EQ(OpeningHours{}.describe(), "not available");
}

TEST(Label, ParsesNamesAndCodes)
{
    for (auto l : kAllLabels)
    {
        EXPECT_EQ(parse_label(to_string(l)), l);
        EXPECT_EQ(parse_label(short_code(l)), l);
    }
    EXPECT_EQ(parse_label("correct but not optimal"), Label::CorrectNotOptimal);
    EXPECT_EQ(parse_label("deceptively_wrong"), Label::DeceptivelyWrong);
    EXPECT_EQ(short_code(Label::NotReplying), "NRW");
    EXPECT_THROW(parse_label("great"), Error);
}
