#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace loadshape {

struct ReplayInterval {
  std::int64_t start = 0;  // source-time second
  double target_rate = 0;  // events scheduled in this second
  long attempted = 0;
  long completed = 0;
  long failed = 0;         // transport errors plus shed requests
  long late = 0;           // fired more than 100ms after the scheduled instant
};

struct ReplayReport {
  std::vector<ReplayInterval> intervals;
  long attempted = 0;   // always completed + failed
  long completed = 0;
  long failed = 0;
  long shed = 0;        // subset of failed: dropped at the in-flight cap
  long late = 0;
  bool clock_overrun = false;  // scheduler fell behind by more than 1s
  double max_lag_seconds = 0;
};

struct ReplayConfig {
  std::string target_url;      // ignored under dry_run
  int max_in_flight = 256;
  double time_scale = 1.0;     // 60 compresses one hour into one minute
  bool dry_run = false;        // no network I/O, timing feasibility only
};

/// Fire each event at its scheduled instant, open-loop: send times never
/// wait on responses. Events beyond max_in_flight are shed (counted failed),
/// not delayed. Requires sorted timestamps; checks the target with one probe
/// request first and throws TargetUnreachable if it cannot be reached.
ReplayReport replay(const std::vector<double>& events, const ReplayConfig& cfg);

struct ClfTemplate {
  std::string client = "synthetic";
  std::string method = "GET";
  std::string path = "/";
  int status = 200;
  std::int64_t bytes = 0;
};

/// One CLF line per event (timestamps floored to whole seconds, the format's
/// resolution). Parsing the file back yields the same per-second counts.
void write_clf(const std::vector<double>& events, const ClfTemplate& tpl,
               const std::filesystem::path& path);

void write_report_json(const ReplayReport& r, const std::filesystem::path& path);

}  // namespace loadshape
