#pragma once

#include <cstdint>
#include <string>
#include <string_view>

// Calendar helpers over UTC epoch seconds. Every instant in the library is an
// epoch-seconds int64; days are represented by the epoch second of their
// midnight.
namespace loadshape::cal {

inline constexpr std::int64_t kHour = 3600;
inline constexpr std::int64_t kDay = 86400;

/// Proleptic-Gregorian civil time (UTC) to epoch seconds. Throws
/// std::invalid_argument on out-of-range fields.
std::int64_t civil_to_epoch(int year, unsigned month, unsigned day, int hh, int mm, int ss);

/// Midnight of the day containing the instant (floor, negative-safe).
std::int64_t day_of(std::int64_t epoch) noexcept;

/// Top of the hour containing the instant.
std::int64_t hour_of(std::int64_t epoch) noexcept;

/// Hour-of-day in [0,24).
int hour_of_day(std::int64_t epoch) noexcept;

/// ISO weekday of the containing day: 1 = Monday .. 7 = Sunday.
unsigned iso_weekday(std::int64_t epoch) noexcept;

/// Midnight of the Monday on or before the instant.
std::int64_t monday_of(std::int64_t epoch) noexcept;

bool is_weekend(std::int64_t epoch) noexcept;

/// 1-based month of the containing day.
unsigned month_of(std::int64_t epoch) noexcept;

/// Civil date of the containing day as yyyy-mm-dd.
std::string format_date(std::int64_t epoch);

/// yyyy-mm-dd to the midnight of that day. Throws std::invalid_argument.
std::int64_t parse_date(std::string_view text);

/// "Jan".."Dec" to 1..12. Throws std::invalid_argument on anything else.
unsigned month_from_abbrev(std::string_view abbrev);

/// 1..12 to "Jan".."Dec".
std::string_view month_abbrev(unsigned month);

}  // namespace loadshape::cal
