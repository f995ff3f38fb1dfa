#include "loadshape/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include <json.hpp>

#include "loadshape/calendar.hpp"
#include "loadshape/csv.hpp"
#include "loadshape/errors.hpp"
#include "loadshape/rng.hpp"

namespace loadshape {

namespace {

constexpr int kMaxIterations = 300;
constexpr int kMaxPolishRounds = 50;
// Pair exchanges cost O(n^2 k) per sweep, so they only run on matrices small
// enough for that to stay negligible.
constexpr Eigen::Index kPairSweepLimit = 512;

Eigen::Index count_distinct(const Eigen::Ref<const Eigen::MatrixXd>& rows) {
  std::set<std::vector<double>> seen;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    std::vector<double> v(rows.row(i).begin(), rows.row(i).end());
    seen.insert(std::move(v));
  }
  return Eigen::Index(seen.size());
}

/// Greedy k-means++: each new centroid is drawn from 2+floor(log k)
/// candidates sampled proportional to current squared distance, keeping the
/// candidate that minimizes the total potential.
Eigen::MatrixXd seed_centroids(const Eigen::Ref<const Eigen::MatrixXd>& rows, int k,
                               const DistanceConfig& cfg, std::mt19937_64& gen) {
  const Eigen::Index n = rows.rows();
  Eigen::MatrixXd centroids(k, rows.cols());
  centroids.row(0) = rows.row(Eigen::Index(rng::uniform_index(gen, std::uint64_t(n))));

  Eigen::VectorXd dist2(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double d = distance(rows.row(i).transpose(), centroids.row(0).transpose(), cfg);
    dist2[i] = d * d;
  }

  const int candidates = 2 + int(std::floor(std::log(double(k))));
  for (int c = 1; c < k; ++c) {
    double pot = dist2.sum();
    Eigen::Index best_idx = 0;
    double best_pot = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_dist2;
    for (int trial = 0; trial < candidates; ++trial) {
      Eigen::Index pick;
      if (pot > 0) {
        double r = rng::uniform01(gen) * pot;
        double acc = 0;
        pick = n - 1;
        for (Eigen::Index i = 0; i < n; ++i) {
          acc += dist2[i];
          if (acc >= r) {
            pick = i;
            break;
          }
        }
      } else {
        pick = Eigen::Index(rng::uniform_index(gen, std::uint64_t(n)));
      }
      Eigen::VectorXd trial_dist2(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        double d = distance(rows.row(i).transpose(), rows.row(pick).transpose(), cfg);
        trial_dist2[i] = std::min(dist2[i], d * d);
      }
      double trial_pot = trial_dist2.sum();
      if (trial_pot < best_pot) {
        best_pot = trial_pot;
        best_idx = pick;
        best_dist2 = std::move(trial_dist2);
      }
    }
    centroids.row(c) = rows.row(best_idx);
    dist2 = best_dist2;
  }
  return centroids;
}

}  // namespace

ClusterModel kmeans(const Eigen::Ref<const Eigen::MatrixXd>& rows, int k,
                    const DistanceConfig& cfg, std::uint64_t seed, bool with_silhouette) {
  const Eigen::Index n = rows.rows();
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (n < k || count_distinct(rows) < k)
    throw TooFewRows("need at least " + std::to_string(k) + " distinct rows");

  auto gen = rng::engine(seed);
  ClusterModel model;
  model.k = k;
  model.metric = cfg;
  model.seed = seed;
  model.centroids = seed_centroids(rows, k, cfg, gen);
  model.assignments.assign(std::size_t(n), -1);

  for (int round = 0; round < kMaxPolishRounds; ++round) {
    model.converged = false;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
      // Assignment phase.
      bool changed = false;
      double inertia = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
          double d = distance(rows.row(i).transpose(), model.centroids.row(c).transpose(), cfg);
          if (d < best_d) {
            best_d = d;
            best = c;
          }
        }
        if (model.assignments[std::size_t(i)] != best) changed = true;
        model.assignments[std::size_t(i)] = best;
        inertia += best_d * best_d;
      }
      model.inertia_trace.push_back(inertia);
      model.inertia = inertia;
      if (!changed) {
        model.converged = true;
        break;
      }

      // Empty-cluster repair: hand each empty label the farthest member of the
      // currently largest cluster.
      std::vector<int> sizes(std::size_t(k), 0);
      for (int a : model.assignments) ++sizes[std::size_t(a)];
      for (int c = 0; c < k; ++c) {
        if (sizes[std::size_t(c)] > 0) continue;
        int largest = int(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
        Eigen::Index farthest = -1;
        double far_d = -1;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (model.assignments[std::size_t(i)] != largest) continue;
          double d =
              distance(rows.row(i).transpose(), model.centroids.row(largest).transpose(), cfg);
          if (d > far_d) {
            far_d = d;
            farthest = i;
          }
        }
        model.assignments[std::size_t(farthest)] = c;
        --sizes[std::size_t(largest)];
        sizes[std::size_t(c)] = 1;
      }

      // Update phase: coordinate-wise member means (for every metric; DTW
      // support is comparative, not barycentric).
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, rows.cols());
      std::vector<int> counts(std::size_t(k), 0);
      for (Eigen::Index i = 0; i < n; ++i) {
        sums.row(model.assignments[std::size_t(i)]) += rows.row(i);
        ++counts[std::size_t(model.assignments[std::size_t(i)])];
      }
      for (int c = 0; c < k; ++c)
        if (counts[std::size_t(c)] > 0)
          model.centroids.row(c) = sums.row(c) / counts[std::size_t(c)];
    }

    // Single-point polish: an assignment-stable partition can still sit above
    // a neighbouring one, because moving x from cluster A (size nA, mean a)
    // to B (size nB, mean b) changes the total within-cluster sum of squares
    // by nB/(nB+1)*|x-b|^2 - nA/(nA-1)*|x-a|^2, which can be negative even
    // when x is nearer to a than to b. Apply every such improving move, then
    // let the assignment loop settle again. The identity is squared-norm
    // algebra, so only the euclidean metric qualifies.
    if (cfg.metric != Metric::euclidean) break;
    std::vector<int> sizes(std::size_t(k), 0);
    for (int a : model.assignments) ++sizes[std::size_t(a)];
    bool moved = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int from = model.assignments[std::size_t(i)];
      if (sizes[std::size_t(from)] <= 1) continue;  // never empty a cluster
      double na = double(sizes[std::size_t(from)]);
      double leave = na / (na - 1) * (rows.row(i) - model.centroids.row(from)).squaredNorm();
      int to = from;
      double best_gain = 1e-12;
      for (int c = 0; c < k; ++c) {
        if (c == from) continue;
        double nb = double(sizes[std::size_t(c)]);
        double join = nb / (nb + 1) * (rows.row(i) - model.centroids.row(c)).squaredNorm();
        if (leave - join > best_gain) {
          best_gain = leave - join;
          to = c;
        }
      }
      if (to == from) continue;
      double nb = double(sizes[std::size_t(to)]);
      model.centroids.row(from) =
          (na * model.centroids.row(from) - rows.row(i)) / (na - 1);
      model.centroids.row(to) = (nb * model.centroids.row(to) + rows.row(i)) / (nb + 1);
      --sizes[std::size_t(from)];
      ++sizes[std::size_t(to)];
      model.assignments[std::size_t(i)] = to;
      moved = true;
    }

    // Pair polish: a partition can be stable under every single-point move
    // yet improve when two points cross together. The set form of the same
    // identity, for S of size s with mean m, is
    //   s * (nB/(nB+s)*|b-m|^2 - nA/(nA-s)*|a-m|^2),
    // the internal scatter of S cancels. Pairs unlock these plateaus at desk
    // scale; the sweep is quadratic in rows, so large matrices skip it.
    if (!moved && n <= kPairSweepLimit) {
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
          int from = model.assignments[std::size_t(i)];
          if (model.assignments[std::size_t(j)] != from) continue;
          if (sizes[std::size_t(from)] <= 2) continue;  // never empty a cluster
          double na = double(sizes[std::size_t(from)]);
          Eigen::RowVectorXd m = (rows.row(i) + rows.row(j)) / 2.0;
          double leave = na / (na - 2) * (m - model.centroids.row(from)).squaredNorm();
          int to = from;
          double best_gain = 1e-12;
          for (int c = 0; c < k; ++c) {
            if (c == from) continue;
            double nb = double(sizes[std::size_t(c)]);
            double join = nb / (nb + 2) * (m - model.centroids.row(c)).squaredNorm();
            if (leave - join > best_gain) {
              best_gain = leave - join;
              to = c;
            }
          }
          if (to == from) continue;
          double nb = double(sizes[std::size_t(to)]);
          model.centroids.row(from) =
              (na * model.centroids.row(from) - rows.row(i) - rows.row(j)) / (na - 2);
          model.centroids.row(to) =
              (nb * model.centroids.row(to) + rows.row(i) + rows.row(j)) / (nb + 2);
          sizes[std::size_t(from)] -= 2;
          sizes[std::size_t(to)] += 2;
          model.assignments[std::size_t(i)] = to;
          model.assignments[std::size_t(j)] = to;
          moved = true;
        }
      }
    }
    if (!moved) break;

    // Rebuild exact member means before settling again; the incremental
    // updates above accumulate rounding.
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, rows.cols());
    for (Eigen::Index i = 0; i < n; ++i)
      sums.row(model.assignments[std::size_t(i)]) += rows.row(i);
    for (int c = 0; c < k; ++c)
      if (sizes[std::size_t(c)] > 0) model.centroids.row(c) = sums.row(c) / sizes[std::size_t(c)];
  }

  model.sizes.assign(std::size_t(k), 0);
  for (int a : model.assignments) ++model.sizes[std::size_t(a)];
  model.silhouette = (with_silhouette && k >= 2) ? silhouette(rows, model.assignments, cfg)
                                                 : std::numeric_limits<double>::quiet_NaN();
  return model;
}

double silhouette(const Eigen::Ref<const Eigen::MatrixXd>& rows,
                  const std::vector<int>& assignments, const DistanceConfig& cfg) {
  const Eigen::Index n = rows.rows();
  if (std::size_t(n) != assignments.size())
    throw LengthMismatch("assignment list does not match row count");
  int k = assignments.empty() ? 0 : *std::max_element(assignments.begin(), assignments.end()) + 1;
  std::vector<int> sizes(std::size_t(k), 0);
  for (int a : assignments) ++sizes[std::size_t(a)];
  if (std::count_if(sizes.begin(), sizes.end(), [](int s) { return s > 0; }) < 2)
    throw SingleCluster("silhouette needs at least two non-empty clusters");

  // Pairwise distances once; n stays desk-scale here.
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      d(i, j) = d(j, i) = distance(rows.row(i).transpose(), rows.row(j).transpose(), cfg);

  double total = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    int own = assignments[std::size_t(i)];
    if (sizes[std::size_t(own)] <= 1) continue;  // singleton contributes 0

    Eigen::VectorXd sum = Eigen::VectorXd::Zero(k);
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) sum[assignments[std::size_t(j)]] += d(i, j);

    double a = sum[own] / (sizes[std::size_t(own)] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c == own || sizes[std::size_t(c)] == 0) continue;
      b = std::min(b, sum[c] / sizes[std::size_t(c)]);
    }
    total += (b - a) / std::max(a, b);
  }
  return total / double(n);
}

KSelection select_k(const Eigen::Ref<const Eigen::MatrixXd>& rows, int k_min, int k_max,
                    const DistanceConfig& cfg, const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("select_k needs at least one seed");
  const int n = int(rows.rows());
  k_max = std::min(k_max, n);
  if (k_min < 2 || k_min > k_max)
    throw TooFewRows("k range [" + std::to_string(k_min) + "," + std::to_string(k_max) +
                     "] is empty");

  KSelection sel;
  double best_sil = -std::numeric_limits<double>::infinity();
  for (int k = k_min; k <= k_max; ++k) {
    ClusterModel best_for_k;
    double best_inertia = std::numeric_limits<double>::infinity();
    for (std::uint64_t seed : seeds) {
      ClusterModel m = kmeans(rows, k, cfg, seed, /*with_silhouette=*/false);
      if (m.inertia < best_inertia) {
        best_inertia = m.inertia;
        best_for_k = std::move(m);
      }
    }
    best_for_k.silhouette = silhouette(rows, best_for_k.assignments, cfg);
    sel.curve.push_back({k, best_for_k.silhouette, best_for_k.inertia});
    if (best_for_k.silhouette > best_sil) {  // strict: ties stay at smaller k
      best_sil = best_for_k.silhouette;
      sel.k_best = k;
      sel.best = std::move(best_for_k);
    }
  }
  return sel;
}

void write_model_json(const ClusterModel& model, const std::vector<RowInfo>& rows,
                      const std::filesystem::path& path) {
  if (rows.size() != model.assignments.size())
    throw LengthMismatch("row info does not match assignments");
  nlohmann::json j;
  j["k"] = model.k;
  j["metric"] = model.metric.metric == Metric::euclidean ? "euclidean"
                : model.metric.metric == Metric::dtw     ? "dtw"
                                                         : "softdtw";
  if (model.metric.metric == Metric::softdtw) j["gamma"] = model.metric.gamma;
  j["seed"] = model.seed;
  j["inertia"] = model.inertia;
  j["silhouette"] = model.silhouette;
  j["converged"] = model.converged;
  j["sizes"] = model.sizes;
  auto centroids = nlohmann::json::array();
  for (Eigen::Index c = 0; c < model.centroids.rows(); ++c) {
    auto row = nlohmann::json::array();
    for (Eigen::Index x = 0; x < model.centroids.cols(); ++x) row.push_back(model.centroids(c, x));
    centroids.push_back(std::move(row));
  }
  j["centroids"] = std::move(centroids);
  auto assignments = nlohmann::json::array();
  for (std::size_t i = 0; i < rows.size(); ++i)
    assignments.push_back({{"dataset", rows[i].dataset},
                           {"origin", cal::format_date(rows[i].origin)},
                           {"label", model.assignments[i]}});
  j["assignments"] = std::move(assignments);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("short write to " + path.string());
}

void write_silhouette_curve_csv(const KSelection& sel, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "k,silhouette,inertia\n";
  for (const auto& p : sel.curve)
    out << p.k << ',' << csv::format_double(p.silhouette) << ',' << csv::format_double(p.inertia)
        << "\n";
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace loadshape
