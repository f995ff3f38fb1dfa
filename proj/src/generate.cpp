#include "loadshape/generate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "loadshape/calendar.hpp"
#include "loadshape/csv.hpp"
#include "loadshape/errors.hpp"
#include "loadshape/rng.hpp"

namespace loadshape {

double Schedule::volume() const {
  double sum = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) sum += expected(i);
  return sum;
}

void GenConfig::validate() const {
  if (!(mean_rate > 0)) throw std::invalid_argument("mean rate must be positive");
  if (std_rate < 0) throw std::invalid_argument("std must be non-negative");
  if (resolution <= 0) throw std::invalid_argument("resolution must be positive");
  if (duration < resolution) throw std::invalid_argument("duration shorter than one interval");
  if (burstiness_target && !(*burstiness_target > -1 && *burstiness_target < 1))
    throw std::invalid_argument("burstiness target must be inside (-1,1)");
}

namespace {

/// Seconds per pattern-domain unit: daily shapes run over hours, weekly over
/// days.
std::int64_t domain_unit(const Pattern& p) {
  return p.model.domain_hi - p.model.domain_lo > 10 ? cal::kHour : cal::kDay;
}

/// Pattern value at `elapsed` seconds past the schedule start, cycling over
/// the domain.
double shape_at(const Pattern& p, double elapsed_seconds) {
  double unit = double(domain_unit(p));
  double span = p.model.domain_hi - p.model.domain_lo;
  double t = std::fmod(elapsed_seconds / unit, span);
  if (t < 0) t += span;
  return evaluate(p.model, p.model.domain_lo + t);
}

const Pattern& resolve(const GenConfig& cfg, const PatternLibrary& lib) {
  if (cfg.inline_model) return *cfg.inline_model;
  return lib.at(cfg.pattern);
}

Schedule build(const GenConfig& cfg, const std::string& label,
               const std::function<double(double)>& rate_fn) {
  Schedule s;
  s.resolution = cfg.resolution;
  s.pattern = label;
  s.mean_rate = cfg.mean_rate;
  s.std_rate = cfg.std_rate;
  s.seed = cfg.seed;

  std::int64_t n = cfg.duration / cfg.resolution;
  std::size_t clipped = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    double at = double(i) * double(cfg.resolution);
    double rate = rate_fn(at);
    if (rate < 0) {
      rate = 0;
      ++clipped;
    }
    s.entries.push_back({cfg.start + i * cfg.resolution, rate});
  }
  if (n > 0) s.clipped_fraction = double(clipped) / double(n);
  return s;
}

void check_step(const GenConfig& cfg, const Pattern& p) {
  if (domain_unit(p) % cfg.resolution != 0)
    throw std::invalid_argument("resolution must divide the pattern step of " +
                                std::to_string(domain_unit(p)) + "s");
}

}  // namespace

Schedule rate_schedule(const GenConfig& cfg, const PatternLibrary& lib) {
  cfg.validate();
  const Pattern& p = resolve(cfg, lib);
  check_step(cfg, p);
  return build(cfg, p.name, [&](double elapsed) {
    return cfg.mean_rate + cfg.std_rate * shape_at(p, elapsed);
  });
}

Schedule compose(const std::string& weekly, const std::string& daily, const GenConfig& cfg,
                 const PatternLibrary& lib) {
  cfg.validate();
  const Pattern& pw = lib.at(weekly);
  const Pattern& pd = lib.at(daily);
  if (domain_unit(pw) != cal::kDay || domain_unit(pd) != cal::kHour)
    throw std::invalid_argument("compose expects a weekly and a daily pattern, in that order");
  check_step(cfg, pd);
  double c = cfg.weekly_modulation;
  return build(cfg, weekly + "x" + daily, [&, c](double elapsed) {
    // The weekly value is held constant across each day.
    double day = std::floor(elapsed / double(cal::kDay)) * double(cal::kDay);
    return cfg.mean_rate * (1 + c * shape_at(pw, day)) + cfg.std_rate * shape_at(pd, elapsed);
  });
}

std::vector<double> emit_events(const Schedule& s, std::uint64_t seed) {
  std::vector<double> events;
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    auto g = rng::engine(seed, i);
    std::int64_t count = rng::poisson(g, s.expected(i));
    std::vector<double> local(static_cast<std::size_t>(count));
    for (auto& e : local)
      e = double(s.entries[i].start) + rng::uniform01(g) * double(s.resolution);
    std::sort(local.begin(), local.end());
    events.insert(events.end(), local.begin(), local.end());
  }
  return events;
}

double schedule_burstiness(const Schedule& s) {
  if (s.entries.empty()) throw EmptyResult("burstiness of an empty schedule");
  double mean = 0;
  for (const auto& e : s.entries) mean += e.rate;
  mean /= double(s.entries.size());
  double var = 0;
  for (const auto& e : s.entries) var += (e.rate - mean) * (e.rate - mean);
  double sigma = std::sqrt(var / double(s.entries.size()));
  if (sigma + mean == 0) throw ZeroMean("burstiness of an all-zero schedule");
  return (sigma - mean) / (sigma + mean);
}

Schedule inject_bursts(const Schedule& s, double target_b, std::uint64_t seed) {
  double current = schedule_burstiness(s);
  if (!(target_b > current))
    throw std::invalid_argument("burst injection only raises burstiness (current " +
                                std::to_string(current) + ")");
  const std::size_t n = s.entries.size();
  const double total = std::accumulate(s.entries.begin(), s.entries.end(), 0.0,
                                       [](double acc, const ScheduleEntry& e) { return acc + e.rate; });
  constexpr double kTolerance = 0.05;
  constexpr int kBudget = 1000;
  int steps = 0;

  auto gen = rng::engine(seed);
  // Burst subsets grow monotonically harder to renormalize as the fraction
  // shrinks, so walk fractions large to small, bisecting the boost factor
  // within each.
  for (double fraction : {0.5, 0.25, 0.1, 0.05, 0.02, 0.01}) {
    std::size_t nb = std::max<std::size_t>(1, std::size_t(std::llround(fraction * double(n))));
    if (nb >= n) continue;

    // Random burst subset, fixed per fraction.
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = n - 1; i > 0; --i)
      std::swap(idx[i], idx[rng::uniform_index(gen, i + 1)]);
    std::vector<bool> burst(n, false);
    double burst_total = 0;
    for (std::size_t i = 0; i < nb; ++i) {
      burst[idx[i]] = true;
      burst_total += s.entries[idx[i]].rate;
    }
    if (burst_total <= 0 || burst_total >= total) continue;

    auto apply = [&](double factor) {
      Schedule out = s;
      double scale = (total - factor * burst_total) / (total - burst_total);
      for (std::size_t i = 0; i < n; ++i)
        out.entries[i].rate *= burst[i] ? factor : scale;
      return out;
    };

    double lo = 1.0, hi = total / burst_total * (1 - 1e-9);
    if (schedule_burstiness(apply(hi)) < target_b - kTolerance) continue;  // even maxed out, too low
    while (steps < kBudget) {
      ++steps;
      double mid = (lo + hi) / 2;
      Schedule trial = apply(mid);
      double b = schedule_burstiness(trial);
      if (std::abs(b - target_b) <= kTolerance) return trial;
      (b < target_b ? lo : hi) = mid;
    }
  }
  throw Unreachable("burstiness target " + std::to_string(target_b) +
                    " not reached within the search budget");
}

void write_schedule_csv(const Schedule& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# pattern=" << s.pattern << "\n";
  out << "# mean=" << csv::format_double(s.mean_rate) << "\n";
  out << "# std=" << csv::format_double(s.std_rate) << "\n";
  out << "# seed=" << s.seed << "\n";
  out << "# resolution=" << s.resolution << "\n";
  out << "interval_start,rate\n";
  for (const auto& e : s.entries)
    out << e.start << ',' << csv::format_double(e.rate) << "\n";
  if (!out) throw IoError("short write to " + path.string());
}

namespace {

std::string header_value(const std::string& line, const char* key, const std::filesystem::path& p) {
  std::string prefix = std::string("# ") + key + "=";
  if (line.rfind(prefix, 0) != 0)
    throw Error("expected `" + prefix + "...` in " + p.string());
  return line.substr(prefix.size());
}

}  // namespace

Schedule read_schedule_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  Schedule s;
  std::getline(in, line);
  s.pattern = header_value(line, "pattern", path);
  std::getline(in, line);
  s.mean_rate = csv::parse_double(header_value(line, "mean", path));
  std::getline(in, line);
  s.std_rate = csv::parse_double(header_value(line, "std", path));
  std::getline(in, line);
  s.seed = std::stoull(header_value(line, "seed", path));
  std::getline(in, line);
  s.resolution = std::stoll(header_value(line, "resolution", path));
  std::getline(in, line);  // column header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.back() == '\r') line.pop_back();
    auto fields = csv::split(line, ',');
    if (fields.size() != 2) throw Error("bad schedule row in " + path.string());
    s.entries.push_back(
        ScheduleEntry{std::stoll(std::string(fields[0])), csv::parse_double(fields[1])});
  }
  return s;
}

}  // namespace loadshape
