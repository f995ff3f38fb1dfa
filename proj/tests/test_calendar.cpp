#include <stdexcept>

#include "loadshape/calendar.hpp"

#include <doctest.h>

using namespace loadshape;

TEST_CASE("civil to epoch matches known timestamps") {
  // 1970-01-01 00:00:00 is the epoch itself.
  CHECK(cal::civil_to_epoch(1970, 1, 1, 0, 0, 0) == 0);
  // One day later.
  CHECK(cal::civil_to_epoch(1970, 1, 2, 0, 0, 0) == cal::kDay);
  // 1998-07-13 22:00:01 UTC, a mid-dataset stamp.
  CHECK(cal::civil_to_epoch(1998, 7, 13, 22, 0, 1) == 900367201);
  // Pre-epoch dates land on negative seconds.
  CHECK(cal::civil_to_epoch(1969, 12, 31, 23, 59, 59) == -1);
}

TEST_CASE("civil_to_epoch rejects nonsense dates") {
  CHECK_THROWS_AS(cal::civil_to_epoch(2021, 2, 30, 0, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(cal::civil_to_epoch(2021, 13, 1, 0, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(cal::civil_to_epoch(2021, 1, 1, 24, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(cal::civil_to_epoch(2021, 1, 1, 0, 60, 0), std::invalid_argument);
  // Leap day on a leap year is fine.
  CHECK_NOTHROW(cal::civil_to_epoch(2020, 2, 29, 12, 0, 0));
}

TEST_CASE("day and hour bucketing floors toward minus infinity") {
  CHECK(cal::day_of(0) == 0);
  CHECK(cal::day_of(cal::kDay - 1) == 0);
  CHECK(cal::day_of(cal::kDay) == cal::kDay);
  CHECK(cal::day_of(-1) == -cal::kDay);
  CHECK(cal::hour_of_day(900367201) == 22);
  CHECK(cal::hour_of_day(0) == 0);
  CHECK(cal::hour_of_day(-1) == 23);
}

TEST_CASE("iso weekday and monday anchor") {
  // 1970-01-01 was a Thursday.
  CHECK(cal::iso_weekday(0) == 4);
  // 1998-07-13 was a Monday.
  std::int64_t mon = cal::civil_to_epoch(1998, 7, 13, 10, 0, 0);
  CHECK(cal::iso_weekday(mon) == 1);
  CHECK(cal::monday_of(mon) == cal::civil_to_epoch(1998, 7, 13, 0, 0, 0));
  // Sunday maps back six days.
  std::int64_t sun = cal::civil_to_epoch(1998, 7, 19, 3, 0, 0);
  CHECK(cal::iso_weekday(sun) == 7);
  CHECK(cal::monday_of(sun) == cal::civil_to_epoch(1998, 7, 13, 0, 0, 0));
  CHECK(cal::is_weekend(sun));
  CHECK_FALSE(cal::is_weekend(mon));
}

TEST_CASE("date formatting round trips") {
  std::int64_t t = cal::civil_to_epoch(2007, 8, 30, 0, 0, 0);
  CHECK(cal::format_date(t) == "2007-08-30");
  CHECK(cal::parse_date("2007-08-30") == t);
  CHECK_THROWS_AS(cal::parse_date("2007-8-30"), std::invalid_argument);
  CHECK_THROWS_AS(cal::parse_date("garbage"), std::invalid_argument);
}

TEST_CASE("month abbreviations") {
  CHECK(cal::month_from_abbrev("Jul") == 7);
  CHECK(cal::month_from_abbrev("Dec") == 12);
  CHECK_THROWS_AS(cal::month_from_abbrev("Foo"), std::invalid_argument);
  CHECK(cal::month_abbrev(1) == "Jan");
  CHECK(cal::month_of(cal::civil_to_epoch(1998, 7, 13, 0, 0, 0)) == 7);
}
