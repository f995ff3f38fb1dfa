#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <vector>

#include "loadshape/timeseries.hpp"

namespace loadshape {

/// Coefficient of variation: population sigma / mean. Rows of request counts
/// are non-negative, so ZeroMean fires exactly for all-zero rows.
double cv(const Eigen::Ref<const Eigen::VectorXd>& v);

/// (sigma - mean) / (sigma + mean), in [-1, 1]. -1 is perfectly regular.
double burstiness(const Eigen::Ref<const Eigen::VectorXd>& v);

enum class ProfileReduction {
  per_row_mean,   // dataset value = mean of per-row values
  whole_series,   // dataset value = formula over all entries pooled
};

struct ProfileRow {
  RowInfo row;
  double cv = 0;
  double burstiness = 0;
};

struct DatasetProfile {
  std::string dataset_id;
  Granularity granularity = Granularity::daily;
  ProfileReduction reduction = ProfileReduction::per_row_mean;
  std::vector<ProfileRow> per_row;
  std::vector<RowInfo> excluded;  // all-zero rows, left out of the means
  double cv_mean = 0;
  double burstiness_mean = 0;
};

/// Variability profile of a raw matrix. Throws ProvenanceViolation on
/// preprocessed input: these metrics are defined on counts, and standardized
/// rows have mean 0.
DatasetProfile profile(const WorkloadMatrix& m,
                       ProfileReduction reduction = ProfileReduction::per_row_mean);

/// CSV export: `dataset,granularity,origin,cv,burstiness` per row plus one
/// `summary` row carrying the dataset means.
void write_profile_csv(const DatasetProfile& p, const std::filesystem::path& path);

}  // namespace loadshape
