#include "loadshape/clf.hpp"

#include <cctype>
#include <chrono>
#include <cstdio>

#include "loadshape/calendar.hpp"
#include "loadshape/errors.hpp"

namespace loadshape {

namespace {

struct Cursor {
  std::string_view line;
  std::size_t pos = 0;

  bool done() const { return pos >= line.size(); }
  char peek() const { return line[pos]; }

  void skip_spaces() {
    while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
  }

  [[noreturn]] void fail(const std::string& reason) const { throw MalformedLine(pos, reason); }

  std::string_view word() {
    skip_spaces();
    if (done()) fail("unexpected end of line");
    std::size_t start = pos;
    while (!done() && peek() != ' ' && peek() != '\t') ++pos;
    return line.substr(start, pos - start);
  }

  std::string_view bracketed(char open, char close) {
    skip_spaces();
    if (done() || peek() != open) fail(std::string("expected '") + open + "'");
    std::size_t start = ++pos;
    std::size_t end = line.find(close, start);
    if (end == std::string_view::npos) fail(std::string("unterminated '") + open + "' field");
    pos = end + 1;
    return line.substr(start, end - start);
  }
};

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

std::int64_t to_int(std::string_view s) {
  std::int64_t v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

// dd/Mon/yyyy:HH:MM:SS followed by an optional +-zzzz offset.
std::int64_t parse_timestamp(std::string_view field, TimezonePolicy tz, std::size_t base) {
  auto fail = [&](const std::string& reason) -> std::int64_t {
    throw MalformedLine(base, reason);
  };
  if (field.size() < 20) return fail("timestamp too short");
  if (field[2] != '/' || field[6] != '/' || field[11] != ':' || field[14] != ':' ||
      field[17] != ':')
    return fail("timestamp separators wrong");
  std::string_view dd = field.substr(0, 2), mon = field.substr(3, 3), yyyy = field.substr(7, 4);
  std::string_view hh = field.substr(12, 2), mi = field.substr(15, 2), ss = field.substr(18, 2);
  if (!all_digits(dd) || !all_digits(yyyy) || !all_digits(hh) || !all_digits(mi) ||
      !all_digits(ss))
    return fail("non-numeric timestamp component");
  unsigned month = 0;
  try {
    month = cal::month_from_abbrev(mon);
  } catch (const std::invalid_argument&) {
    return fail("unknown month abbreviation");
  }

  std::int64_t offset_seconds = 0;
  std::string_view rest = field.substr(20);
  while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  if (!rest.empty()) {
    if (rest.size() != 5 || (rest[0] != '+' && rest[0] != '-') || !all_digits(rest.substr(1)))
      return fail("bad timezone offset");
    std::int64_t magnitude = to_int(rest.substr(1, 2)) * 3600 + to_int(rest.substr(3, 2)) * 60;
    offset_seconds = rest[0] == '-' ? -magnitude : magnitude;
  } else if (tz == TimezonePolicy::use_offset) {
    return fail("missing timezone offset");
  }

  std::int64_t local = 0;
  try {
    local = cal::civil_to_epoch(int(to_int(yyyy)), month, unsigned(to_int(dd)),
                                int(to_int(hh)), int(to_int(mi)), int(to_int(ss)));
  } catch (const std::invalid_argument& e) {
    return fail(e.what());
  }
  return local - offset_seconds;
}

// "GET /path HTTP/1.0" plus the glued variant "GET/path HTTP/1.0" seen in
// older traces.
void parse_request(std::string_view request, TraceEvent& out) {
  std::size_t sp = request.find(' ');
  std::string_view first = request.substr(0, sp);
  if (first.find('/') != std::string_view::npos && (sp == std::string_view::npos ||
                                                    request.substr(sp + 1).rfind("HTTP/", 0) == 0)) {
    std::size_t slash = first.find('/');
    if (slash > 0) {
      out.method = std::string(first.substr(0, slash));
      out.path = std::string(first.substr(slash));
      return;
    }
  }
  if (sp == std::string_view::npos) {
    out.method = std::string(first);
    return;
  }
  out.method = std::string(first);
  std::string_view rest = request.substr(sp + 1);
  std::size_t sp2 = rest.rfind(' ');
  if (sp2 != std::string_view::npos && rest.substr(sp2 + 1).rfind("HTTP/", 0) == 0)
    rest = rest.substr(0, sp2);
  out.path = std::string(rest);
}

}  // namespace

std::optional<TraceEvent> parse_clf_line(std::string_view line, TimezonePolicy tz) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
  Cursor cur{line};
  cur.skip_spaces();
  if (cur.done()) return std::nullopt;

  TraceEvent ev;
  ev.client = std::string(cur.word());
  cur.word();  // ident
  cur.word();  // authuser

  cur.skip_spaces();
  std::size_t ts_base = cur.pos + 1;
  std::string_view when = cur.bracketed('[', ']');
  ev.timestamp = parse_timestamp(when, tz, ts_base);

  std::string_view request = cur.bracketed('"', '"');
  parse_request(request, ev);

  std::string_view status = cur.word();
  if (status == "-") {
    ev.status = kUnknownStatus;
  } else if (all_digits(status)) {
    std::int64_t code = to_int(status);
    if (code < 100 || code > 599) cur.fail("status code out of range");
    ev.status = int(code);
  } else {
    cur.fail("non-numeric status");
  }

  std::string_view bytes = cur.word();
  if (bytes == "-") {
    ev.bytes = kUnknownBytes;
  } else if (all_digits(bytes)) {
    ev.bytes = to_int(bytes);
  } else {
    cur.fail("non-numeric byte count");
  }

  return ev;
}

std::string format_clf_line(const TraceEvent& event) {
  using namespace std::chrono;
  std::int64_t midnight = cal::day_of(event.timestamp);
  year_month_day ymd{sys_days{days{midnight / cal::kDay}}};
  std::int64_t within = event.timestamp - midnight;
  int hh = int(within / 3600), mi = int(within % 3600 / 60), ss = int(within % 60);

  char stamp[40];
  std::snprintf(stamp, sizeof(stamp), "%02u/%.3s/%04d:%02d:%02d:%02d +0000",
                unsigned(ymd.day()), cal::month_abbrev(unsigned(ymd.month())).data(),
                int(ymd.year()), hh, mi, ss);

  std::string out;
  out.reserve(96);
  out += event.client;
  out += " - - [";
  out += stamp;
  out += "] \"";
  out += event.method;
  out += ' ';
  out += event.path;
  out += " HTTP/1.0\" ";
  out += event.status == kUnknownStatus ? "-" : std::to_string(event.status);
  out += ' ';
  out += event.bytes == kUnknownBytes ? "-" : std::to_string(event.bytes);
  return out;
}

}  // namespace loadshape
