#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "loadshape/clf.hpp"

namespace loadshape {

enum class SourceFormat { clf, summary };
enum class Compression { none, gzip };

/// How to read one workload source.
struct SourceDescriptor {
  SourceFormat format = SourceFormat::clf;
  std::optional<std::int64_t> bucket_width;  // seconds; summary sources only
  TimezonePolicy timezone_policy = TimezonePolicy::use_offset;
  Compression compression = Compression::none;
  bool strict = false;  // abort on the first malformed line instead of dropping
  std::optional<std::int64_t> bucket_start;  // summary: overrides filename-derived bucket

  void validate() const;  // bucket_width present iff format == summary
};

/// One pre-aggregated count bucket from a summary-based dump.
struct SummaryRecord {
  std::int64_t bucket_start = 0;
  std::int64_t count = 0;
  std::vector<std::pair<std::string, std::string>> labels;

  bool operator==(const SummaryRecord&) const = default;
};

/// Parse one `project page count bytes` line. bucket_start comes from the
/// descriptor or the file name, never the line itself.
SummaryRecord parse_summary_record(std::string_view line, std::int64_t bucket_start,
                                   const SourceDescriptor& desc);

struct ReadStats {
  std::uint64_t total = 0;
  std::uint64_t parsed = 0;
  std::uint64_t skipped = 0;
  std::uint64_t malformed = 0;
};

struct RecordVisitor {
  std::function<void(const TraceEvent&)> on_event;
  std::function<void(const SummaryRecord&)> on_summary;
};

/// Stream a source file (or http(s) URL, fetched to a temp file first) in
/// order, dispatching each parsed record. Lenient mode drops malformed lines
/// and counts them; strict mode rethrows the first MalformedLine.
ReadStats read_source(const std::string& path_or_url, const SourceDescriptor& desc,
                      const RecordVisitor& visit);

/// Derive the hour bucket start from common per-hour file layouts:
/// `.../yyyy/mm/dd/hh.gz` and `pageviews-yyyymmdd-hhmmss[.gz]`.
std::optional<std::int64_t> bucket_start_from_path(const std::filesystem::path& path);

/// Reads lines from plain or gzip files behind one interface.
class LineReader {
public:
  LineReader(const std::filesystem::path& path, Compression compression);
  ~LineReader();
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  bool next(std::string& line);  // false at EOF; line has no trailing newline

private:
  struct Impl;
  Impl* impl_;
};

}  // namespace loadshape
