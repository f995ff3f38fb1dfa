#include "loadshape/timeseries.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include "loadshape/csv.hpp"
#include "loadshape/errors.hpp"

namespace loadshape {

EventBinner::EventBinner(std::string dataset_id, std::int64_t bin_width)
    : dataset_id_(std::move(dataset_id)), bin_width_(bin_width) {
  if (bin_width <= 0) throw std::invalid_argument("bin width must be positive");
}

void EventBinner::add(std::int64_t timestamp) {
  std::int64_t b = timestamp / bin_width_;
  if (timestamp < 0 && timestamp % bin_width_ != 0) --b;
  counts_[b * bin_width_] += 1;
}

void EventBinner::add_summary(const SummaryRecord& rec, std::int64_t bucket_width) {
  if (bucket_width <= 0 || bin_width_ % bucket_width != 0)
    throw IncompatibleBucket("summary bucket of " + std::to_string(bucket_width) +
                             "s does not divide " + std::to_string(bin_width_) + "s bins");
  std::int64_t b = rec.bucket_start / bin_width_;
  if (rec.bucket_start < 0 && rec.bucket_start % bin_width_ != 0) --b;
  counts_[b * bin_width_] += double(rec.count);
}

TimeSeries EventBinner::finish() const {
  TimeSeries ts;
  ts.dataset_id = dataset_id_;
  ts.bin_width = bin_width_;
  if (counts_.empty()) return ts;

  std::int64_t next = counts_.begin()->first;
  for (const auto& [start, count] : counts_) {
    for (; next < start; next += bin_width_) {
      ts.bins.push_back({next, 0});
      ts.gaps.push_back(next);
    }
    ts.bins.push_back({start, count});
    next = start + bin_width_;
  }
  return ts;
}

TimeSeries rebin(const TimeSeries& ts, std::int64_t new_width) {
  if (new_width <= 0 || new_width % ts.bin_width != 0)
    throw IncompatibleBucket("cannot rebin " + std::to_string(ts.bin_width) + "s into " +
                             std::to_string(new_width) + "s");
  std::set<std::int64_t> gap_set(ts.gaps.begin(), ts.gaps.end());

  TimeSeries out;
  out.dataset_id = ts.dataset_id;
  out.bin_width = new_width;
  bool all_gap = true;
  for (const Bin& b : ts.bins) {
    std::int64_t c = b.start / new_width;
    if (b.start < 0 && b.start % new_width != 0) --c;
    std::int64_t coarse = c * new_width;
    if (out.bins.empty() || out.bins.back().start != coarse) {
      if (!out.bins.empty() && all_gap) out.gaps.push_back(out.bins.back().start);
      out.bins.push_back({coarse, 0});
      all_gap = true;
    }
    out.bins.back().count += b.count;
    all_gap = all_gap && gap_set.count(b.start) > 0;
  }
  if (!out.bins.empty() && all_gap) out.gaps.push_back(out.bins.back().start);
  return out;
}

std::string_view to_string(Granularity g) {
  return g == Granularity::daily ? "daily" : "weekly";
}

namespace {

/// Shared grouping core: rows keyed by an anchor (day midnight or week
/// Monday), complete when all `width` slots are filled.
MatrixBuild group_rows(const TimeSeries& ts, Granularity g,
                       std::int64_t (*anchor_of)(std::int64_t),
                       int (*slot_of)(std::int64_t)) {
  const int width = width_of(g);
  MatrixBuild build;
  build.matrix.id = ts.dataset_id;
  build.matrix.granularity = g;
  build.matrix.provenance = Provenance::raw;

  struct Partial {
    Eigen::VectorXd v;
    int filled = 0;
  };
  std::map<std::int64_t, Partial> groups;
  for (const Bin& b : ts.bins) {
    auto& p = groups[anchor_of(b.start)];
    if (p.v.size() == 0) p.v = Eigen::VectorXd::Zero(width);
    p.v[slot_of(b.start)] = b.count;
    ++p.filled;
  }

  std::vector<RowInfo> rows;
  std::vector<Eigen::VectorXd> kept;
  for (auto& [origin, p] : groups) {
    if (p.filled == width) {
      rows.push_back({ts.dataset_id, origin});
      kept.push_back(std::move(p.v));
    } else {
      build.dropped.push_back(origin);
    }
  }

  build.matrix.rows = std::move(rows);
  build.matrix.values.resize(Eigen::Index(kept.size()), width);
  for (std::size_t i = 0; i < kept.size(); ++i)
    build.matrix.values.row(Eigen::Index(i)) = kept[i].transpose();
  return build;
}

}  // namespace

MatrixBuild to_daily_matrix(const TimeSeries& ts) {
  if (ts.bin_width != cal::kHour)
    throw std::invalid_argument("daily matrix needs 1h bins");
  return group_rows(ts, Granularity::daily, [](std::int64_t t) { return cal::day_of(t); },
                    [](std::int64_t t) { return cal::hour_of_day(t); });
}

MatrixBuild to_weekly_matrix(const TimeSeries& ts) {
  if (ts.bin_width != cal::kDay)
    throw std::invalid_argument("weekly matrix needs 1d bins");
  return group_rows(ts, Granularity::weekly,
                    [](std::int64_t t) { return cal::monday_of(t); },
                    [](std::int64_t t) { return int(cal::iso_weekday(t)) - 1; });
}

WorkloadMatrix combine(const std::vector<WorkloadMatrix>& parts) {
  if (parts.empty()) throw EmptyResult("nothing to combine");
  WorkloadMatrix out;
  out.id = "combined";
  out.granularity = parts.front().granularity;
  out.provenance = parts.front().provenance;

  Eigen::Index total = 0;
  for (const auto& m : parts) {
    if (m.granularity != out.granularity || m.provenance != out.provenance)
      throw std::invalid_argument("cannot combine mixed granularities or provenance");
    total += m.values.rows();
  }
  out.values.resize(total, width_of(out.granularity));
  out.rows.reserve(std::size_t(total));
  Eigen::Index at = 0;
  for (const auto& m : parts) {
    out.values.middleRows(at, m.values.rows()) = m.values;
    out.rows.insert(out.rows.end(), m.rows.begin(), m.rows.end());
    at += m.values.rows();
  }
  return out;
}

void write_matrix_csv(const WorkloadMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# dataset=" << m.id << "\n";
  out << "# granularity=" << to_string(m.granularity) << "\n";
  out << "# provenance=" << (m.provenance == Provenance::raw ? "raw" : "preprocessed") << "\n";
  out << "dataset,origin";
  for (int j = 0; j < m.width(); ++j) out << ",v" << j;
  out << "\n";
  for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
    out << m.rows[std::size_t(i)].dataset << ',' << cal::format_date(m.rows[std::size_t(i)].origin);
    for (Eigen::Index j = 0; j < m.values.cols(); ++j)
      out << ',' << csv::format_double(m.values(i, j));
    out << "\n";
  }
  if (!out) throw IoError("short write to " + path.string());
}

namespace {

std::string comment_value(const std::string& line, const char* key) {
  std::string prefix = std::string("# ") + key + "=";
  if (line.rfind(prefix, 0) != 0) throw Error("expected `" + prefix + "...` in CSV header");
  return line.substr(prefix.size());
}

}  // namespace

WorkloadMatrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;

  WorkloadMatrix m;
  std::getline(in, line);
  m.id = comment_value(line, "dataset");
  std::getline(in, line);
  auto gran = comment_value(line, "granularity");
  if (gran == "daily")
    m.granularity = Granularity::daily;
  else if (gran == "weekly")
    m.granularity = Granularity::weekly;
  else
    throw Error("unknown granularity `" + gran + "` in " + path.string());
  std::getline(in, line);
  auto prov = comment_value(line, "provenance");
  if (prov == "raw")
    m.provenance = Provenance::raw;
  else if (prov == "preprocessed")
    m.provenance = Provenance::preprocessed;
  else
    throw Error("unknown provenance `" + prov + "` in " + path.string());
  std::getline(in, line);  // column header

  const int width = m.width();
  std::vector<Eigen::VectorXd> kept;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = csv::split(line, ',');
    if (int(fields.size()) != width + 2)
      throw Error("bad matrix row width in " + path.string());
    m.rows.push_back(RowInfo{std::string(fields[0]), cal::parse_date(fields[1])});
    Eigen::VectorXd v(width);
    for (int j = 0; j < width; ++j) v[j] = csv::parse_double(fields[std::size_t(j) + 2]);
    kept.push_back(std::move(v));
  }
  m.values.resize(Eigen::Index(kept.size()), width);
  for (std::size_t i = 0; i < kept.size(); ++i)
    m.values.row(Eigen::Index(i)) = kept[i].transpose();
  return m;
}

void write_series_csv(const TimeSeries& ts, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  std::set<std::int64_t> gap_set(ts.gaps.begin(), ts.gaps.end());
  out << "# dataset=" << ts.dataset_id << "\n";
  out << "# bin_width=" << ts.bin_width << "\n";
  out << "bin_start,count,gap\n";
  for (const Bin& b : ts.bins)
    out << b.start << ',' << csv::format_double(b.count) << ','
        << (gap_set.count(b.start) ? 1 : 0) << "\n";
  if (!out) throw IoError("short write to " + path.string());
}

TimeSeries read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;

  TimeSeries ts;
  std::getline(in, line);
  ts.dataset_id = comment_value(line, "dataset");
  std::getline(in, line);
  ts.bin_width = std::stoll(comment_value(line, "bin_width"));
  std::getline(in, line);  // column header

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.back() == '\r') line.pop_back();
    auto fields = csv::split(line, ',');
    if (fields.size() != 3) throw Error("bad series row in " + path.string());
    Bin b{std::stoll(std::string(fields[0])), csv::parse_double(fields[1])};
    ts.bins.push_back(b);
    if (fields[2] == "1") ts.gaps.push_back(b.start);
  }
  return ts;
}

}  // namespace loadshape
