// Command-line front end: every subcommand is a thin shell over one library
// call, so behavior stays testable without a terminal.

#include <Eigen/Core>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "loadshape/association.hpp"
#include "loadshape/calendar.hpp"
#include "loadshape/csv.hpp"
#include "loadshape/errors.hpp"
#include "loadshape/generate.hpp"
#include "loadshape/ingest.hpp"
#include "loadshape/patterns.hpp"
#include "loadshape/pipeline.hpp"
#include "loadshape/polyfit.hpp"
#include "loadshape/replay.hpp"
#include "loadshape/stats.hpp"
#include "loadshape/timeseries.hpp"
#include "loadshape/wikimedia.hpp"

namespace {

namespace cal = loadshape::cal;
using loadshape::Granularity;

/// Accepts either an epoch-seconds integer or a yyyy-mm-dd date.
std::int64_t parse_when(const std::string& s) {
  if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos)
    return std::stoll(s);
  return cal::parse_date(s);
}

loadshape::SourceFormat format_from(const std::string& v) {
  if (v == "clf") return loadshape::SourceFormat::clf;
  if (v == "summary") return loadshape::SourceFormat::summary;
  throw std::invalid_argument("unknown format `" + v + "` (expected clf or summary)");
}

loadshape::TimezonePolicy timezone_from(const std::string& v) {
  if (v == "use_offset") return loadshape::TimezonePolicy::use_offset;
  if (v == "assume_utc") return loadshape::TimezonePolicy::assume_utc;
  throw std::invalid_argument("unknown timezone policy `" + v + "`");
}

loadshape::Compression compression_from(const std::string& v) {
  if (v == "none") return loadshape::Compression::none;
  if (v == "gzip") return loadshape::Compression::gzip;
  throw std::invalid_argument("unknown compression `" + v + "`");
}

loadshape::Metric metric_from(const std::string& v) {
  if (v == "euclidean") return loadshape::Metric::euclidean;
  if (v == "dtw") return loadshape::Metric::dtw;
  if (v == "softdtw") return loadshape::Metric::softdtw;
  throw std::invalid_argument("unknown metric `" + v + "`");
}

std::vector<std::uint64_t> seeds_from(const std::string& v) {
  std::vector<std::uint64_t> seeds;
  for (auto part : loadshape::csv::split(v, ',')) seeds.push_back(std::stoull(std::string(part)));
  if (seeds.empty()) throw std::invalid_argument("empty seed list");
  return seeds;
}

std::filesystem::path default_cache() {
  if (const char* env = std::getenv("LOADSHAPE_CACHE")) return env;
  return "cache";
}

// -- shared flag bundle for describing one source ----------------------------

struct SourceFlags {
  std::string format = "clf";
  std::int64_t bucket_width = 0;
  std::int64_t bucket_start = -1;
  std::string timezone = "use_offset";
  std::string compression = "none";
  bool strict = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--format", format, "Source format: clf or summary")
        ->default_str("clf");
    cmd->add_option("--bucket-width", bucket_width,
                    "Summary sources: seconds covered by each record");
    cmd->add_option("--bucket-start", bucket_start,
                    "Summary sources: epoch override for the file's bucket");
    cmd->add_option("--timezone", timezone, "use_offset or assume_utc")
        ->default_str("use_offset");
    cmd->add_option("--compression", compression, "none or gzip")->default_str("none");
    cmd->add_flag("--strict", strict, "Abort on the first malformed line");
  }

  loadshape::SourceDescriptor descriptor() const {
    loadshape::SourceDescriptor d;
    d.format = format_from(format);
    if (bucket_width > 0) d.bucket_width = bucket_width;
    if (bucket_start >= 0) d.bucket_start = bucket_start;
    d.timezone_policy = timezone_from(timezone);
    d.compression = compression_from(compression);
    d.strict = strict;
    d.validate();
    return d;
  }
};

// -- subcommand bodies --------------------------------------------------------

int run_fetch(const std::string& project, const std::string& base_url, const std::string& start,
              const std::string& end, const std::filesystem::path& cache) {
  loadshape::FetchConfig cfg;
  cfg.project = project;
  if (!base_url.empty()) cfg.base_url = base_url;
  auto result = loadshape::fetch_wikimedia(cfg, parse_when(start), parse_when(end), cache);
  std::cout << "fetched " << result.files.size() << " hour file(s): " << result.downloaded
            << " downloaded, " << result.cached << " cached\n";
  return 0;
}

int run_ingest(const std::string& input, const std::string& dataset, const SourceFlags& src,
               std::int64_t bin_width, const std::string& output) {
  loadshape::SourceDescriptor desc = src.descriptor();
  loadshape::EventBinner binner(dataset, bin_width);
  loadshape::RecordVisitor visit;
  visit.on_event = [&](const loadshape::TraceEvent& ev) { binner.add_event(ev); };
  visit.on_summary = [&](const loadshape::SummaryRecord& r) {
    binner.add_summary(r, desc.bucket_width.value());
  };
  auto stats = loadshape::read_source(input, desc, visit);
  loadshape::TimeSeries ts = binner.finish();
  loadshape::write_series_csv(ts, output);
  std::cout << "parsed " << stats.parsed << "/" << stats.total << " line(s) ("
            << stats.malformed << " malformed, " << stats.skipped << " skipped) into "
            << ts.bins.size() << " bin(s) -> " << output << "\n";
  return 0;
}

int run_aggregate(const std::string& series, const std::string& granularity,
                  const std::string& output) {
  loadshape::TimeSeries ts = loadshape::read_series_csv(series);
  loadshape::MatrixBuild build;
  if (granularity == "daily") {
    if (ts.bin_width != cal::kHour) ts = rebin(ts, cal::kHour);
    build = to_daily_matrix(ts);
  } else if (granularity == "weekly") {
    if (ts.bin_width != cal::kDay) ts = rebin(ts, cal::kDay);
    build = to_weekly_matrix(ts);
  } else {
    throw std::invalid_argument("unknown granularity `" + granularity + "`");
  }
  loadshape::write_matrix_csv(build.matrix, output);
  std::cout << build.matrix.values.rows() << " row(s), " << build.dropped.size()
            << " incomplete dropped -> " << output << "\n";
  return 0;
}

int run_profile(const std::string& matrix, const std::string& reduction,
                const std::string& output) {
  loadshape::WorkloadMatrix m = loadshape::read_matrix_csv(matrix);
  auto r = reduction == "whole_series" ? loadshape::ProfileReduction::whole_series
                                       : loadshape::ProfileReduction::per_row_mean;
  if (reduction != "whole_series" && reduction != "per_row_mean")
    throw std::invalid_argument("unknown reduction `" + reduction + "`");
  loadshape::DatasetProfile p = loadshape::profile(m, r);
  loadshape::write_profile_csv(p, output);
  std::cout << p.per_row.size() << " row(s), cv_mean=" << p.cv_mean
            << " burstiness_mean=" << p.burstiness_mean << " -> " << output << "\n";
  return 0;
}

int run_fit(const std::string& matrix, int degree, const std::string& output) {
  loadshape::WorkloadMatrix m = loadshape::read_matrix_csv(matrix);
  const bool daily = m.granularity == Granularity::daily;
  if (degree == 0) degree = daily ? 3 : 2;
  const double t0 = daily ? 0 : 1;
  Eigen::VectorXd t(m.width());
  for (int i = 0; i < m.width(); ++i) t[i] = t0 + i;

  loadshape::PatternLibrary lib;
  for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
    const auto& info = m.rows[std::size_t(i)];
    loadshape::PolynomialModel pm =
        loadshape::fit_polynomial(m.values.row(i).transpose(), degree, t);
    lib.add(loadshape::Pattern{info.dataset + "@" + cal::format_date(info.origin),
                               "row fit, degree " + std::to_string(degree), pm});
  }
  loadshape::write_library_json(lib, output);
  std::cout << "fitted " << lib.entries().size() << " row(s) -> " << output << "\n";
  return 0;
}

int run_characterize(const CLI::App* cmd, const std::string& config_file,
                     const std::string& input, const std::string& id, const SourceFlags& src,
                     const std::string& output_dir, double alpha, bool smoothing,
                     const std::string& scope, const std::string& metric, double gamma, int k_min,
                     int k_max, const std::string& seeds) {
  loadshape::PipelineConfig cfg;
  if (!config_file.empty()) cfg = loadshape::read_config(config_file);

  auto passed = [&](const std::string& flag) { return cmd->count(flag) > 0; };
  if (passed("--output-dir")) cfg.output_dir = output_dir;
  if (passed("--alpha")) cfg.smoothing.alpha = alpha;
  if (passed("--smoothing") || passed("--no-smoothing")) cfg.smoothing.enabled = smoothing;
  if (passed("--scope")) {
    if (scope == "per_row")
      cfg.scope = loadshape::StandardizeScope::per_row;
    else if (scope == "per_dataset")
      cfg.scope = loadshape::StandardizeScope::per_dataset;
    else
      throw std::invalid_argument("unknown scope `" + scope + "`");
  }
  if (passed("--metric")) cfg.metric.metric = metric_from(metric);
  if (passed("--gamma")) cfg.metric.gamma = gamma;
  if (passed("--k-min")) cfg.k_min = k_min;
  if (passed("--k-max")) cfg.k_max = k_max;
  if (passed("--seeds")) cfg.seeds = seeds_from(seeds);
  if (!input.empty())
    cfg.datasets.push_back(loadshape::DatasetSpec{id, input, src.descriptor()});

  loadshape::CharacterizeReport rep = loadshape::run_characterize(cfg);
  for (const auto& s : rep.stages)
    std::cout << std::left << std::setw(11) << s.stage << s.status
              << (s.detail.empty() ? "" : "  " + s.detail) << "\n";
  std::cout << "bundle: " << rep.bundle_dir.string() << "\n";
  return 0;
}

int run_generate(const CLI::App* cmd, const std::string& library, bool list_patterns,
                 const std::string& pattern, const std::string& compose_weekly, double mean,
                 double stddev, int days, std::int64_t resolution, const std::string& start,
                 const std::string& noise, double burstiness_target, double weekly_modulation,
                 std::uint64_t seed, const std::string& schedule_out, const std::string& events_out,
                 const std::string& clf_out) {
  loadshape::PatternLibrary lib = library.empty() ? loadshape::PatternLibrary::builtin()
                                                  : loadshape::read_library_json(library);
  if (list_patterns) {
    for (const auto& p : lib.entries()) {
      std::cout << std::left << std::setw(6) << p.name << "degree " << p.model.degree
                << "  domain [" << p.model.domain_lo << "," << p.model.domain_hi << ")  coeffs";
      for (Eigen::Index i = 0; i < p.model.coefficients.size(); ++i)
        std::cout << ' ' << loadshape::csv::format_double(p.model.coefficients[i]);
      std::cout << "  " << p.description << "\n";
    }
    return 0;
  }

  loadshape::GenConfig cfg;
  cfg.pattern = pattern;
  cfg.mean_rate = mean;
  cfg.std_rate = stddev;
  cfg.duration = std::int64_t(days) * cal::kDay;
  cfg.resolution = resolution;
  if (!start.empty()) cfg.start = parse_when(start);
  if (noise == "none")
    cfg.noise = loadshape::NoiseModel::none;
  else if (noise == "poisson")
    cfg.noise = loadshape::NoiseModel::poisson;
  else
    throw std::invalid_argument("unknown noise model `" + noise + "`");
  if (cmd->count("--burstiness")) cfg.burstiness_target = burstiness_target;
  cfg.weekly_modulation = weekly_modulation;
  cfg.seed = seed;
  cfg.validate();

  loadshape::Schedule s = compose_weekly.empty()
                              ? loadshape::rate_schedule(cfg, lib)
                              : loadshape::compose(compose_weekly, pattern, cfg, lib);
  if (cfg.burstiness_target) s = loadshape::inject_bursts(s, *cfg.burstiness_target, seed);

  std::cout << s.entries.size() << " interval(s), expected volume " << s.volume();
  if (s.clipped_fraction > 0) std::cout << ", clipped " << s.clipped_fraction * 100 << "%";
  std::cout << "\n";

  if (!schedule_out.empty()) {
    loadshape::write_schedule_csv(s, schedule_out);
    std::cout << "schedule -> " << schedule_out << "\n";
  }
  if (!events_out.empty() || !clf_out.empty()) {
    std::vector<double> events = cfg.noise == loadshape::NoiseModel::poisson
                                     ? loadshape::emit_events(s, seed)
                                     : loadshape::emit_events(s, seed);
    if (!events_out.empty()) {
      std::ofstream out(events_out, std::ios::binary | std::ios::trunc);
      if (!out) throw loadshape::IoError("cannot write " + events_out);
      for (double e : events) out << loadshape::csv::format_double(e) << "\n";
      std::cout << events.size() << " event(s) -> " << events_out << "\n";
    }
    if (!clf_out.empty()) {
      loadshape::write_clf(events, loadshape::ClfTemplate{}, clf_out);
      std::cout << events.size() << " event(s) -> " << clf_out << "\n";
    }
  }
  return 0;
}

int run_replay(const std::string& events_file, const std::string& schedule_file,
               std::uint64_t seed, const std::string& target, int max_in_flight,
               double time_scale, bool dry_run, const std::string& report_out) {
  std::vector<double> events;
  if (!events_file.empty()) {
    std::ifstream in(events_file, std::ios::binary);
    if (!in) throw loadshape::IoError("cannot read " + events_file);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      events.push_back(loadshape::csv::parse_double(line));
    }
  } else if (!schedule_file.empty()) {
    loadshape::Schedule s = loadshape::read_schedule_csv(schedule_file);
    events = loadshape::emit_events(s, seed);
  } else {
    throw std::invalid_argument("replay needs --events or --schedule");
  }

  loadshape::ReplayConfig cfg;
  cfg.target_url = target;
  cfg.max_in_flight = max_in_flight;
  cfg.time_scale = time_scale;
  cfg.dry_run = dry_run;
  loadshape::ReplayReport rep = loadshape::replay(events, cfg);

  std::cout << "attempted " << rep.attempted << ", completed " << rep.completed << ", failed "
            << rep.failed << " (" << rep.shed << " shed), late " << rep.late << ", max lag "
            << rep.max_lag_seconds << "s" << (rep.clock_overrun ? " [clock overrun]" : "")
            << "\n";
  if (!report_out.empty()) {
    loadshape::write_report_json(rep, report_out);
    std::cout << "report -> " << report_out << "\n";
  }
  return 0;
}

int run_report(const std::string& bundle) {
  namespace fs = std::filesystem;
  auto load = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw loadshape::IoError("cannot read " + p.string());
    return nlohmann::json::parse(in);
  };
  nlohmann::json manifest = load(fs::path(bundle) / "manifest.json");
  nlohmann::json report = load(fs::path(bundle) / "report.json");

  std::cout << "stages:\n";
  for (const auto& s : manifest["stages"])
    std::cout << "  " << std::left << std::setw(11) << s["stage"].get<std::string>()
              << s["status"].get<std::string>() << "  " << s["detail"].get<std::string>() << "\n";

  auto arm = [&](const char* name) {
    const auto& run = report[name];
    const auto& ref = report["reference"][name];
    std::cout << name << ": rows " << run["rows"] << " (reference " << ref["rows"] << "), k "
              << run["k"] << " (reference " << ref["k"] << "), sizes " << run["sizes"].dump()
              << " (reference " << ref["sizes"].dump() << ")\n";
  };
  arm("daily");
  arm("weekly");
  std::cout << "dominant cell " << report["dominant_cell_pct"] << "% (reference "
            << report["reference"]["dominant_cell_pct"] << "%)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"web workload characterization toolkit"};
  app.require_subcommand(1);

  // fetch
  auto* fetch = app.add_subcommand("fetch", "Download hourly pageview aggregates into the cache");
  std::string fetch_project = "en", fetch_base, fetch_start, fetch_end;
  std::filesystem::path fetch_cache = default_cache();
  fetch->add_option("--project", fetch_project, "Cache subdirectory label");
  fetch->add_option("--base-url", fetch_base, "Override the dump server base URL");
  fetch->add_option("--start", fetch_start, "First hour (yyyy-mm-dd or epoch seconds)")
      ->required();
  fetch->add_option("--end", fetch_end, "End of range, exclusive")->required();
  fetch->add_option("--cache", fetch_cache, "Cache directory (env LOADSHAPE_CACHE)");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Parse a trace into binned counts");
  std::string in_input, in_dataset = "dataset", in_output;
  std::int64_t in_bin_width = cal::kHour;
  SourceFlags in_src;
  ingest->add_option("--input", in_input, "Trace file or http(s) URL")->required();
  ingest->add_option("--dataset", in_dataset, "Dataset id recorded in the output");
  in_src.attach(ingest);
  ingest->add_option("--bin-width", in_bin_width, "Bin width in seconds")->default_str("3600");
  ingest->add_option("--output", in_output, "Series CSV path")->required();

  // aggregate
  auto* aggregate = app.add_subcommand("aggregate", "Build a daily or weekly matrix");
  std::string ag_series, ag_granularity = "daily", ag_output;
  aggregate->add_option("--series", ag_series, "Series CSV from ingest")->required();
  aggregate->add_option("--granularity", ag_granularity, "daily or weekly");
  aggregate->add_option("--output", ag_output, "Matrix CSV path")->required();

  // profile
  auto* prof = app.add_subcommand("profile", "Variability metrics for a matrix");
  std::string pr_matrix, pr_reduction = "per_row_mean", pr_output;
  prof->add_option("--matrix", pr_matrix, "Matrix CSV")->required();
  prof->add_option("--reduction", pr_reduction, "per_row_mean or whole_series");
  prof->add_option("--output", pr_output, "Profile CSV path")->required();

  // characterize
  auto* ch = app.add_subcommand("characterize", "Full pipeline into an artifact bundle");
  std::string ch_config, ch_input, ch_id = "dataset", ch_outdir = "out", ch_scope = "per_row";
  std::string ch_metric = "euclidean", ch_seeds;
  SourceFlags ch_src;
  double ch_alpha = 0.3, ch_gamma = 1.0;
  bool ch_smoothing = true;
  int ch_kmin = 2, ch_kmax = 20;
  ch->add_option("--config", ch_config, "key=value config file");
  ch->add_option("--input", ch_input, "Single dataset trace (alternative to --config)");
  ch->add_option("--id", ch_id, "Dataset id for --input");
  ch_src.attach(ch);
  ch->add_option("--output-dir", ch_outdir, "Bundle directory");
  ch->add_option("--alpha", ch_alpha, "Smoothing weight in (0,1]");
  ch->add_flag("--smoothing,!--no-smoothing", ch_smoothing, "Toggle the smoothing pass");
  ch->add_option("--scope", ch_scope, "per_row or per_dataset standardization");
  ch->add_option("--metric", ch_metric, "euclidean, dtw, or softdtw");
  ch->add_option("--gamma", ch_gamma, "soft-DTW smoothing parameter");
  ch->add_option("--k-min", ch_kmin, "Smallest cluster count tried");
  ch->add_option("--k-max", ch_kmax, "Largest cluster count tried");
  ch->add_option("--seeds", ch_seeds, "Comma-separated clustering seeds");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit polynomials to every matrix row");
  std::string ft_matrix, ft_output;
  int ft_degree = 0;
  fit->add_option("--matrix", ft_matrix, "Matrix CSV")->required();
  fit->add_option("--degree", ft_degree, "2 or 3 (default by granularity)");
  fit->add_option("--output", ft_output, "Pattern library JSON path")->required();

  // generate
  auto* gen = app.add_subcommand("generate", "Synthesize a schedule and events");
  std::string g_library, g_pattern = "D1", g_compose, g_start, g_noise = "poisson";
  std::string g_schedule, g_events, g_clf;
  double g_mean = 1000, g_std = 300, g_burst = 0, g_weekly_mod = 0.2;
  int g_days = 1;
  std::int64_t g_resolution = 3600;
  std::uint64_t g_seed = 1;
  bool g_list = false;
  gen->add_flag("--list-patterns", g_list, "Print the pattern library and exit");
  gen->add_option("--library", g_library, "Pattern library JSON (default: built-ins)");
  gen->add_option("--pattern", g_pattern, "Pattern name (daily shape under --compose)");
  gen->add_option("--compose", g_compose, "Weekly pattern modulating the daily one");
  gen->add_option("--mean", g_mean, "Mean rate, requests/hour");
  gen->add_option("--std", g_std, "Shape amplitude, requests/hour");
  gen->add_option("--days", g_days, "Schedule length in days");
  gen->add_option("--resolution", g_resolution, "Interval width in seconds");
  gen->add_option("--start", g_start, "Schedule origin (yyyy-mm-dd or epoch)");
  gen->add_option("--noise", g_noise, "poisson or none");
  gen->add_option("--burstiness", g_burst, "Raise burstiness to this target");
  gen->add_option("--weekly-modulation", g_weekly_mod, "Weekly amplitude under --compose");
  gen->add_option("--seed", g_seed, "Generator seed");
  gen->add_option("--schedule", g_schedule, "Write the schedule CSV here");
  gen->add_option("--events", g_events, "Write event timestamps here, one per line");
  gen->add_option("--clf", g_clf, "Write events as a CLF access log here");

  // replay
  auto* rp = app.add_subcommand("replay", "Fire events at a target, open-loop");
  std::string rp_events, rp_schedule, rp_target, rp_report;
  std::uint64_t rp_seed = 1;
  int rp_max_in_flight = 256;
  double rp_time_scale = 1.0;
  bool rp_dry = false;
  rp->add_option("--events", rp_events, "Event timestamps, one per line");
  rp->add_option("--schedule", rp_schedule, "Schedule CSV to emit events from");
  rp->add_option("--seed", rp_seed, "Emission seed under --schedule");
  rp->add_option("--target", rp_target, "Base URL to fire requests at");
  rp->add_option("--max-in-flight", rp_max_in_flight, "Concurrent request cap");
  rp->add_option("--time-scale", rp_time_scale, "Source seconds per wall second");
  rp->add_flag("--dry-run", rp_dry, "Timing feasibility only, no network");
  rp->add_option("--report", rp_report, "Write the replay report JSON here");

  // report
  auto* rep = app.add_subcommand("report", "Summarize a bundle against reference values");
  std::string rep_bundle;
  rep->add_option("--bundle", rep_bundle, "Bundle directory from characterize")->required();

  try {
    app.parse(argc, argv);

    if (*fetch)
      return run_fetch(fetch_project, fetch_base, fetch_start, fetch_end, fetch_cache);
    if (*ingest) return run_ingest(in_input, in_dataset, in_src, in_bin_width, in_output);
    if (*aggregate) return run_aggregate(ag_series, ag_granularity, ag_output);
    if (*prof) return run_profile(pr_matrix, pr_reduction, pr_output);
    if (*ch)
      return run_characterize(ch, ch_config, ch_input, ch_id, ch_src, ch_outdir, ch_alpha,
                              ch_smoothing, ch_scope, ch_metric, ch_gamma, ch_kmin, ch_kmax,
                              ch_seeds);
    if (*fit) return run_fit(ft_matrix, ft_degree, ft_output);
    if (*gen)
      return run_generate(gen, g_library, g_list, g_pattern, g_compose, g_mean, g_std, g_days,
                          g_resolution, g_start, g_noise, g_burst, g_weekly_mod, g_seed,
                          g_schedule, g_events, g_clf);
    if (*rp)
      return run_replay(rp_events, rp_schedule, rp_seed, rp_target, rp_max_in_flight,
                        rp_time_scale, rp_dry, rp_report);
    if (*rep) return run_report(rep_bundle);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const loadshape::PartialRange& e) {
    std::cerr << "loadshape: " << e.what() << "\n";
    for (const auto& h : e.missing()) std::cerr << "  missing " << h << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "loadshape: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
