#include "loadshape/preprocess.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "loadshape/errors.hpp"

namespace loadshape {

Eigen::VectorXd zscore_row(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() < 2) throw std::invalid_argument("z-score needs at least 2 entries");
  double mean = v.mean();
  double sigma = std::sqrt((v.array() - mean).square().mean());
  if (sigma == 0) throw DegenerateRow("flat row has zero standard deviation");
  return (v.array() - mean) / sigma;
}

Eigen::VectorXd ema(const Eigen::Ref<const Eigen::VectorXd>& v, const SmoothingConfig& cfg) {
  if (v.size() == 0) throw std::invalid_argument("ema of empty vector");
  if (!(cfg.alpha > 0 && cfg.alpha <= 1))
    throw std::invalid_argument("smoothing factor must be in (0,1]");
  if (!cfg.enabled) return v;
  Eigen::VectorXd out(v.size());
  out[0] = v[0];
  for (Eigen::Index t = 1; t < v.size(); ++t)
    out[t] = cfg.alpha * v[t] + (1 - cfg.alpha) * out[t - 1];
  return out;
}

PreprocessResult preprocess_matrix(const WorkloadMatrix& m, const SmoothingConfig& cfg,
                                   StandardizeScope scope) {
  PreprocessResult res;
  res.matrix.id = m.id;
  res.matrix.granularity = m.granularity;
  res.matrix.provenance = Provenance::preprocessed;

  // Dataset-scope moments, when requested, come from every entry of every
  // row the dataset contributed.
  std::map<std::string, std::pair<double, double>> moments;
  if (scope == StandardizeScope::per_dataset) {
    std::map<std::string, std::vector<double>> pooled;
    for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
      auto& pool = pooled[m.rows[std::size_t(i)].dataset];
      for (Eigen::Index j = 0; j < m.values.cols(); ++j) pool.push_back(m.values(i, j));
    }
    for (auto& [id, pool] : pooled) {
      Eigen::Map<Eigen::VectorXd> v(pool.data(), Eigen::Index(pool.size()));
      double mean = v.mean();
      moments[id] = {mean, std::sqrt((v.array() - mean).square().mean())};
    }
  }

  std::vector<Eigen::VectorXd> kept;
  for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
    const auto& info = m.rows[std::size_t(i)];
    Eigen::VectorXd row = m.values.row(i).transpose();
    try {
      if (scope == StandardizeScope::per_row) {
        row = zscore_row(row);
      } else {
        auto [mean, sigma] = moments.at(info.dataset);
        if (sigma == 0) throw DegenerateRow("dataset is entirely flat");
        row = (row.array() - mean) / sigma;
      }
    } catch (const DegenerateRow&) {
      res.degenerate.push_back(info);
      continue;
    }
    kept.push_back(ema(row, cfg));
    res.matrix.rows.push_back(info);
  }

  if (kept.empty()) throw EmptyResult("every row was degenerate");
  res.matrix.values.resize(Eigen::Index(kept.size()), m.values.cols());
  for (std::size_t i = 0; i < kept.size(); ++i)
    res.matrix.values.row(Eigen::Index(i)) = kept[i].transpose();
  return res;
}

}  // namespace loadshape
