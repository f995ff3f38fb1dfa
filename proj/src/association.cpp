#include "loadshape/association.hpp"

#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "loadshape/csv.hpp"
#include "loadshape/errors.hpp"

namespace loadshape {

namespace {

void check(const LabeledRows& lr, const char* what) {
  if (lr.rows.size() != lr.labels.size())
    throw LengthMismatch(std::string(what) + " labels do not match rows");
  for (int l : lr.labels)
    if (l < 0 || std::size_t(l) >= lr.label_names.size())
      throw UnknownLabel(std::string(what) + " label out of range");
}

}  // namespace

FrequencyTable association_table(const LabeledRows& daily, const LabeledRows& weekly) {
  check(daily, "daily");
  check(weekly, "weekly");

  // (dataset, monday) -> weekly label
  std::map<std::pair<std::string, std::int64_t>, int> weeks;
  for (std::size_t i = 0; i < weekly.rows.size(); ++i)
    weeks[{weekly.rows[i].dataset, weekly.rows[i].origin}] = weekly.labels[i];

  FrequencyTable t;
  t.row_labels = weekly.label_names;
  t.col_labels = daily.label_names;
  const Eigen::Index wk = Eigen::Index(weekly.label_names.size());
  const Eigen::Index dk = Eigen::Index(daily.label_names.size());
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(wk, dk);
  std::map<std::pair<Eigen::Index, Eigen::Index>, std::set<std::string>> cell_datasets;

  for (std::size_t i = 0; i < daily.rows.size(); ++i) {
    const auto& info = daily.rows[i];
    auto it = weeks.find({info.dataset, cal::monday_of(info.origin)});
    if (it == weeks.end()) continue;  // day outside any clustered week
    Eigen::Index r = it->second, c = daily.labels[i];
    counts(r, c) += 1;
    cell_datasets[{r, c}].insert(info.dataset);
    ++t.matched_days;
  }
  if (t.matched_days == 0) throw NoOverlap("no clustered day falls inside a clustered week");

  t.percentages = counts * (100.0 / double(t.matched_days));
  t.dataset_counts = Eigen::MatrixXi::Zero(wk, dk);
  for (const auto& [cell, datasets] : cell_datasets)
    t.dataset_counts(cell.first, cell.second) = int(datasets.size());
  t.row_totals = t.percentages.rowwise().sum();
  t.col_totals = t.percentages.colwise().sum();
  return t;
}

TimeDependence time_dependence(const LabeledRows& rows, TimeScheme scheme, SeasonMode mode) {
  check(rows, "assignment");

  TimeDependence td;
  td.scheme = scheme;
  td.labels = rows.label_names;
  if (scheme == TimeScheme::weekday_weekend)
    td.buckets = {"weekday", "weekend"};
  else if (mode == SeasonMode::meteorological)
    td.buckets = {"winter", "spring", "summer", "autumn"};
  else
    td.buckets = {"q1", "q2", "q3", "q4"};

  const Eigen::Index k = Eigen::Index(rows.label_names.size());
  const Eigen::Index nb = Eigen::Index(td.buckets.size());
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(k, nb);
  for (std::size_t i = 0; i < rows.rows.size(); ++i) {
    std::int64_t origin = rows.rows[i].origin;
    Eigen::Index bucket;
    if (scheme == TimeScheme::weekday_weekend) {
      bucket = cal::is_weekend(origin) ? 1 : 0;
    } else {
      unsigned month = cal::month_of(origin);
      if (mode == SeasonMode::meteorological)
        bucket = month % 12 / 3;  // Dec..Feb -> 0, Mar..May -> 1, ...
      else
        bucket = (month - 1) / 3;
    }
    counts(rows.labels[i], bucket) += 1;
  }

  td.percentages = Eigen::MatrixXd::Zero(k, nb);
  for (Eigen::Index c = 0; c < k; ++c) {
    double total = counts.row(c).sum();
    if (total > 0) td.percentages.row(c) = counts.row(c) * (100.0 / total);
  }
  return td;
}

void write_frequency_csv(const FrequencyTable& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "weekly";
  for (const auto& c : t.col_labels) out << ',' << c << ',' << c << "_datasets";
  out << ",total\n";
  for (Eigen::Index r = 0; r < t.percentages.rows(); ++r) {
    out << t.row_labels[std::size_t(r)];
    for (Eigen::Index c = 0; c < t.percentages.cols(); ++c)
      out << ',' << csv::format_double(t.percentages(r, c)) << ',' << t.dataset_counts(r, c);
    out << ',' << csv::format_double(t.row_totals[r]) << "\n";
  }
  out << "total";
  for (Eigen::Index c = 0; c < t.percentages.cols(); ++c)
    out << ',' << csv::format_double(t.col_totals[c]) << ',';
  out << ',' << csv::format_double(t.percentages.sum()) << "\n";
  if (!out) throw IoError("short write to " + path.string());
}

void write_time_dependence_csv(const TimeDependence& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "label";
  for (const auto& b : t.buckets) out << ',' << b;
  out << "\n";
  for (Eigen::Index r = 0; r < t.percentages.rows(); ++r) {
    out << t.labels[std::size_t(r)];
    for (Eigen::Index c = 0; c < t.percentages.cols(); ++c)
      out << ',' << csv::format_double(t.percentages(r, c));
    out << "\n";
  }
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace loadshape
