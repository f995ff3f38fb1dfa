#include "loadshape/distance.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "loadshape/errors.hpp"

namespace loadshape {

double euclidean(const Eigen::Ref<const Eigen::VectorXd>& a,
                 const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size())
    throw LengthMismatch("euclidean distance of lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  return (a - b).norm();
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Shared DP over the (n+1)x(m+1) cumulative-cost grid; `combine` is min for
/// dtw and softmin for soft-dtw. Row-at-a-time keeps memory linear.
template <typename Combine>
double alignment_cost(const Eigen::Ref<const Eigen::VectorXd>& a,
                      const Eigen::Ref<const Eigen::VectorXd>& b, Combine combine) {
  const Eigen::Index n = a.size(), m = b.size();
  if (n == 0 || m == 0) throw std::invalid_argument("alignment of empty series");
  std::vector<double> prev(std::size_t(m) + 1, kInf), cur(std::size_t(m) + 1, kInf);
  prev[0] = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    cur[0] = kInf;
    for (Eigen::Index j = 1; j <= m; ++j) {
      double d = a[i - 1] - b[j - 1];
      cur[std::size_t(j)] =
          d * d + combine(prev[std::size_t(j) - 1], prev[std::size_t(j)], cur[std::size_t(j) - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[std::size_t(m)];
}

}  // namespace

double dtw(const Eigen::Ref<const Eigen::VectorXd>& a,
           const Eigen::Ref<const Eigen::VectorXd>& b) {
  double cost = alignment_cost(a, b, [](double x, double y, double z) {
    return std::min(x, std::min(y, z));
  });
  return std::sqrt(cost);
}

double softdtw(const Eigen::Ref<const Eigen::VectorXd>& a,
               const Eigen::Ref<const Eigen::VectorXd>& b, double gamma) {
  if (!(gamma > 0)) throw std::invalid_argument("soft-dtw smoothing must be positive");
  // softmin_g(x...) = -g * log(sum exp(-x/g)), evaluated against the running
  // maximum of the -x/g terms so large costs cannot underflow to -inf.
  auto softmin = [gamma](double x, double y, double z) {
    double ax = -x / gamma, ay = -y / gamma, az = -z / gamma;
    double hi = std::max(ax, std::max(ay, az));
    if (hi == -kInf) return kInf;
    double sum = std::exp(ax - hi) + std::exp(ay - hi) + std::exp(az - hi);
    return -gamma * (hi + std::log(sum));
  };
  return alignment_cost(a, b, softmin);
}

double distance(const Eigen::Ref<const Eigen::VectorXd>& a,
                const Eigen::Ref<const Eigen::VectorXd>& b, const DistanceConfig& cfg) {
  switch (cfg.metric) {
    case Metric::euclidean: return euclidean(a, b);
    case Metric::dtw: return dtw(a, b);
    case Metric::softdtw: return softdtw(a, b, cfg.gamma);
  }
  throw std::invalid_argument("unknown metric");
}

}  // namespace loadshape
