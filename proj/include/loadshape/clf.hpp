#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace loadshape {

inline constexpr int kUnknownStatus = -1;
inline constexpr std::int64_t kUnknownBytes = -1;

/// One request parsed from an event-based access log. Timestamps are UTC
/// epoch seconds after offset normalization.
struct TraceEvent {
  std::int64_t timestamp = 0;
  std::string client;
  std::string method;
  std::string path;
  int status = kUnknownStatus;
  std::int64_t bytes = kUnknownBytes;

  bool operator==(const TraceEvent&) const = default;
};

enum class TimezonePolicy {
  use_offset,  // the [..] field must carry a +-zzzz offset
  assume_utc,  // missing offset treated as +0000; present offsets still honored
};

/// Parse one Common Log Format line:
///   host ident authuser [dd/Mon/yyyy:HH:MM:SS +-zzzz] "request" status bytes
/// Returns nullopt for blank lines, throws MalformedLine otherwise. Trailing
/// fields beyond `bytes` (combined-format referrer/agent) are tolerated and
/// ignored. Request fields glued to the method, as in "GET/x.gif HTTP/1.0",
/// are split at the first slash.
std::optional<TraceEvent> parse_clf_line(std::string_view line,
                                         TimezonePolicy tz = TimezonePolicy::use_offset);

/// Render an event as one CLF line with a +0000 offset. parse_clf_line of the
/// result reproduces the event field by field.
std::string format_clf_line(const TraceEvent& event);

}  // namespace loadshape
