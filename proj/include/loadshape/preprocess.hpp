#pragma once

#include <Eigen/Core>

#include <vector>

#include "loadshape/timeseries.hpp"

namespace loadshape {

struct SmoothingConfig {
  double alpha = 0.3;  // in (0,1]; 1 disables the memory term
  bool enabled = true;
};

enum class StandardizeScope { per_row, per_dataset };

/// (v - mean) / population stddev. Throws DegenerateRow when the stddev is
/// zero; a flat row has no shape to cluster. Needs at least 2 entries.
Eigen::VectorXd zscore_row(const Eigen::Ref<const Eigen::VectorXd>& v);

/// Exponential moving average: out[0] = v[0], out[t] = a*v[t] + (1-a)*out[t-1].
Eigen::VectorXd ema(const Eigen::Ref<const Eigen::VectorXd>& v, const SmoothingConfig& cfg);

struct PreprocessResult {
  WorkloadMatrix matrix;          // provenance flipped to preprocessed
  std::vector<RowInfo> degenerate;  // removed flat rows
};

/// Standardize then smooth every row, in that order. Degenerate rows are
/// removed and itemized; EmptyResult when nothing survives. per_dataset scope
/// standardizes with each dataset's global moments instead of per-row ones.
PreprocessResult preprocess_matrix(const WorkloadMatrix& m, const SmoothingConfig& cfg,
                                   StandardizeScope scope = StandardizeScope::per_row);

}  // namespace loadshape
