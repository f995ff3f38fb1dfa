#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "loadshape/patterns.hpp"

namespace loadshape {

struct ScheduleEntry {
  std::int64_t start = 0;  // epoch seconds
  double rate = 0;         // requests per hour across this interval, >= 0
};

struct Schedule {
  std::int64_t resolution = 3600;      // seconds per entry, contiguous
  std::vector<ScheduleEntry> entries;
  std::string pattern;                 // generating pattern name(s)
  double mean_rate = 0;                // the mu it was built from
  double std_rate = 0;                 // the sigma it was built from
  std::uint64_t seed = 0;
  double clipped_fraction = 0;         // share of entries clamped at zero

  /// Expected request count of one entry (rate is per hour).
  double expected(std::size_t i) const {
    return entries[i].rate * double(resolution) / 3600.0;
  }
  /// Expected request count of the whole schedule.
  double volume() const;
};

enum class NoiseModel { none, poisson };

struct GenConfig {
  std::string pattern;        // library name; ignored when inline_model set
  std::optional<Pattern> inline_model;
  double mean_rate = 1000;    // requests/hour, > 0
  double std_rate = 300;      // requests/hour, >= 0
  std::int64_t start = 0;     // schedule origin, pattern-aligned
  std::int64_t duration = 24 * 3600;
  std::int64_t resolution = 3600;  // must divide the pattern's natural step
  NoiseModel noise = NoiseModel::poisson;
  std::optional<double> burstiness_target;  // in (-1,1)
  double weekly_modulation = 0.2;  // compose() only
  std::uint64_t seed = 1;

  void validate() const;  // std::invalid_argument on bad combinations
};

/// Periodic rate schedule from one pattern: the instantaneous rate is
/// max(0, mu + sigma*p(t)) with t in pattern-domain units cycling from the
/// schedule start, sampled at interval starts.
Schedule rate_schedule(const GenConfig& cfg, const PatternLibrary& lib);

/// Weekly-modulated daily schedule: the weekly pattern scales each day's
/// mean multiplicatively (coefficient weekly_modulation), the daily pattern
/// shapes hours additively: rate = max(0, mu*(1 + c*p_w(day)) + sigma*p_d(hour)).
Schedule compose(const std::string& weekly, const std::string& daily, const GenConfig& cfg,
                 const PatternLibrary& lib);

/// Piecewise-constant-intensity Poisson process over the schedule: one
/// Poisson count per interval (sub-stream per interval index, so emission is
/// deterministic per seed and independent of evaluation order), timestamps
/// uniform within the interval, returned sorted. Fractional seconds carry
/// sub-second placement.
std::vector<double> emit_events(const Schedule& s, std::uint64_t seed);

/// Burstiness (sigma-mu)/(sigma+mu) over entry rates.
double schedule_burstiness(const Schedule& s);

/// Raise burstiness to target_b (+-0.05) by boosting a random subset of
/// intervals and renormalizing the rest, preserving total volume within 1%
/// (exactly, in fact). Throws std::invalid_argument when target_b does not
/// exceed the current value, Unreachable when the search budget runs out.
Schedule inject_bursts(const Schedule& s, double target_b, std::uint64_t seed);

/// CSV: `# pattern=`, `# mean=`, `# std=`, `# seed=`, `# resolution=`
/// comments, then `interval_start,rate`.
void write_schedule_csv(const Schedule& s, const std::filesystem::path& path);
Schedule read_schedule_csv(const std::filesystem::path& path);

}  // namespace loadshape
