#include "loadshape/calendar.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <stdexcept>

namespace loadshape::cal {

namespace {

constexpr std::array<std::string_view, 12> kMonths = {"Jan", "Feb", "Mar", "Apr",
                                                      "May", "Jun", "Jul", "Aug",
                                                      "Sep", "Oct", "Nov", "Dec"};

std::chrono::sys_days sys_day_of(std::int64_t epoch) noexcept {
  std::int64_t d = epoch / kDay;
  if (epoch < 0 && epoch % kDay != 0) --d;
  return std::chrono::sys_days{std::chrono::days{d}};
}

std::chrono::year_month_day ymd_of(std::int64_t epoch) noexcept {
  return std::chrono::year_month_day{sys_day_of(epoch)};
}

}  // namespace

std::int64_t civil_to_epoch(int year, unsigned month, unsigned day, int hh, int mm, int ss) {
  using namespace std::chrono;
  if (month < 1 || month > 12) throw std::invalid_argument("month out of range");
  year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
  if (!ymd.ok()) throw std::invalid_argument("invalid calendar date");
  if (hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0 || ss > 60)
    throw std::invalid_argument("time of day out of range");
  auto days = sys_days{ymd}.time_since_epoch();
  return std::int64_t(duration_cast<seconds>(days).count()) + hh * 3600LL + mm * 60LL + ss;
}

std::int64_t day_of(std::int64_t epoch) noexcept {
  std::int64_t d = epoch / kDay;
  if (epoch < 0 && epoch % kDay != 0) --d;
  return d * kDay;
}

std::int64_t hour_of(std::int64_t epoch) noexcept {
  std::int64_t h = epoch / kHour;
  if (epoch < 0 && epoch % kHour != 0) --h;
  return h * kHour;
}

int hour_of_day(std::int64_t epoch) noexcept { return int((epoch - day_of(epoch)) / kHour); }

unsigned iso_weekday(std::int64_t epoch) noexcept {
  return std::chrono::weekday{sys_day_of(epoch)}.iso_encoding();
}

std::int64_t monday_of(std::int64_t epoch) noexcept {
  return day_of(epoch) - std::int64_t(iso_weekday(epoch) - 1) * kDay;
}

bool is_weekend(std::int64_t epoch) noexcept { return iso_weekday(epoch) >= 6; }

unsigned month_of(std::int64_t epoch) noexcept { return unsigned(ymd_of(epoch).month()); }

std::string format_date(std::int64_t epoch) {
  auto ymd = ymd_of(epoch);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                unsigned(ymd.day()));
  return buf;
}

std::int64_t parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-')
    throw std::invalid_argument("expected yyyy-mm-dd");
  auto digits = [&](int from, int to) {
    int v = 0;
    for (int i = from; i < to; ++i) {
      if (text[i] < '0' || text[i] > '9') throw std::invalid_argument("expected yyyy-mm-dd");
      v = v * 10 + (text[i] - '0');
    }
    return v;
  };
  return civil_to_epoch(digits(0, 4), unsigned(digits(5, 7)), unsigned(digits(8, 10)), 0, 0, 0);
}

unsigned month_from_abbrev(std::string_view abbrev) {
  for (unsigned i = 0; i < kMonths.size(); ++i)
    if (abbrev == kMonths[i]) return i + 1;
  throw std::invalid_argument("unknown month abbreviation");
}

std::string_view month_abbrev(unsigned month) { return kMonths.at(month - 1); }

}  // namespace loadshape::cal
