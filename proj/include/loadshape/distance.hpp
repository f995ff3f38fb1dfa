#pragma once

#include <Eigen/Core>

namespace loadshape {

enum class Metric { euclidean, dtw, softdtw };

struct DistanceConfig {
  Metric metric = Metric::euclidean;
  double gamma = 1.0;  // soft-dtw smoothing only; must be > 0
};

/// L2 norm of a - b. Throws LengthMismatch.
double euclidean(const Eigen::Ref<const Eigen::VectorXd>& a,
                 const Eigen::Ref<const Eigen::VectorXd>& b);

/// Dynamic time warping with squared pointwise cost and unit steps
/// (match/insert/delete). Returns the square root of the optimal path cost,
/// so dtw(a, b) <= euclidean(a, b) for equal lengths.
double dtw(const Eigen::Ref<const Eigen::VectorXd>& a,
           const Eigen::Ref<const Eigen::VectorXd>& b);

/// Soft-DTW: dtw with min replaced by softmin_gamma. The raw smoothed cost is
/// returned (no square root); it can be negative by construction.
double softdtw(const Eigen::Ref<const Eigen::VectorXd>& a,
               const Eigen::Ref<const Eigen::VectorXd>& b, double gamma);

double distance(const Eigen::Ref<const Eigen::VectorXd>& a,
                const Eigen::Ref<const Eigen::VectorXd>& b, const DistanceConfig& cfg);

}  // namespace loadshape
