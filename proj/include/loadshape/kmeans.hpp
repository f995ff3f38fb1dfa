#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <vector>

#include "loadshape/distance.hpp"
#include "loadshape/timeseries.hpp"

namespace loadshape {

struct ClusterModel {
  int k = 0;
  DistanceConfig metric;
  std::uint64_t seed = 0;
  Eigen::MatrixXd centroids;      // k x width
  std::vector<int> assignments;   // one label in [0,k) per row
  std::vector<int> sizes;         // members per label, all positive
  double inertia = 0;             // sum of squared row-to-centroid distances
  double silhouette = 0;
  bool converged = false;         // assignment fixpoint reached within the cap
  std::vector<double> inertia_trace;  // post-assignment inertia per iteration
};

/// Lloyd's algorithm with greedy k-means++ seeding, deterministic per
/// (rows, k, cfg, seed). Stops at an assignment fixpoint or 300 iterations.
/// Empty clusters are repaired by re-seeding them with the farthest member
/// of the largest cluster. Throws TooFewRows when k exceeds the number of
/// distinct rows.
ClusterModel kmeans(const Eigen::Ref<const Eigen::MatrixXd>& rows, int k,
                    const DistanceConfig& cfg, std::uint64_t seed,
                    bool with_silhouette = true);

/// Mean over points of (b-a)/max(a,b); a = mean distance to own cluster
/// (excluding self), b = smallest mean distance to another cluster.
/// Singleton-cluster points contribute 0. Throws SingleCluster when fewer
/// than two labels are in use.
double silhouette(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                  const std::vector<int>& assignments, const DistanceConfig& cfg);

struct KSelection {
  int k_best = 0;
  ClusterModel best;
  struct Point {
    int k;
    double silhouette;
    double inertia;
  };
  std::vector<Point> curve;
};

/// For each k in [k_min, min(k_max, rows)], cluster once per seed, keep the
/// best model by inertia, and score it; k_best maximizes silhouette with ties
/// broken toward smaller k.
KSelection select_k(const Eigen::Ref<const Eigen::MatrixXd>& rows, int k_min, int k_max,
                    const DistanceConfig& cfg, const std::vector<std::uint64_t>& seeds);

/// Model export with row origins instead of indices. Deterministic output.
void write_model_json(const ClusterModel& model, const std::vector<RowInfo>& rows,
                      const std::filesystem::path& path);

void write_silhouette_curve_csv(const KSelection& sel, const std::filesystem::path& path);

}  // namespace loadshape
