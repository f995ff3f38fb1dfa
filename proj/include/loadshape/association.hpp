#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

#include "loadshape/timeseries.hpp"

namespace loadshape {

/// Cluster assignments carried with their row identities, the currency of
/// every cross-granularity join.
struct LabeledRows {
  std::vector<RowInfo> rows;
  std::vector<int> labels;                // same length as rows
  std::vector<std::string> label_names;   // one per cluster, index = label
};

struct FrequencyTable {
  std::vector<std::string> row_labels;  // weekly cluster names
  std::vector<std::string> col_labels;  // daily cluster names
  Eigen::MatrixXd percentages;          // cells sum to 100 within rounding
  Eigen::MatrixXi dataset_counts;       // distinct datasets contributing per cell
  Eigen::VectorXd row_totals;
  Eigen::VectorXd col_totals;
  long matched_days = 0;
};

/// Join every clustered day into the clustered Monday-anchored week of the
/// same dataset; cell(Wi, Dj) is the percentage of matched days carrying
/// daily label Dj inside weeks labeled Wi. Days outside clustered weeks are
/// ignored. Throws NoOverlap when nothing joins.
FrequencyTable association_table(const LabeledRows& daily, const LabeledRows& weekly);

enum class TimeScheme { weekday_weekend, season };
enum class SeasonMode { meteorological, calendar_quarter };

struct TimeDependence {
  TimeScheme scheme = TimeScheme::weekday_weekend;
  std::vector<std::string> labels;
  std::vector<std::string> buckets;
  Eigen::MatrixXd percentages;  // labels x buckets, each row sums to 100
};

/// Distribution of each cluster's members over time buckets. Weekday is
/// Monday through Friday. Seasons bucket by the month of the row origin
/// (weekly rows use the week's Monday); meteorological winter is Dec-Feb.
TimeDependence time_dependence(const LabeledRows& rows, TimeScheme scheme,
                               SeasonMode mode = SeasonMode::meteorological);

void write_frequency_csv(const FrequencyTable& t, const std::filesystem::path& path);
void write_time_dependence_csv(const TimeDependence& t, const std::filesystem::path& path);

}  // namespace loadshape
