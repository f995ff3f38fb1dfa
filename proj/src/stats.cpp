#include "loadshape/stats.hpp"

#include <cmath>
#include <fstream>

#include "loadshape/csv.hpp"
#include "loadshape/errors.hpp"

namespace loadshape {

namespace {

std::pair<double, double> mean_sigma(const Eigen::Ref<const Eigen::VectorXd>& v) {
  double mean = v.mean();
  return {mean, std::sqrt((v.array() - mean).square().mean())};
}

}  // namespace

double cv(const Eigen::Ref<const Eigen::VectorXd>& v) {
  auto [mean, sigma] = mean_sigma(v);
  if (mean <= 0) throw ZeroMean("coefficient of variation needs a positive mean");
  return sigma / mean;
}

double burstiness(const Eigen::Ref<const Eigen::VectorXd>& v) {
  auto [mean, sigma] = mean_sigma(v);
  if (mean <= 0 && sigma == 0) throw ZeroMean("burstiness of an all-zero row is undefined");
  return (sigma - mean) / (sigma + mean);
}

DatasetProfile profile(const WorkloadMatrix& m, ProfileReduction reduction) {
  if (m.provenance == Provenance::preprocessed)
    throw ProvenanceViolation("variability metrics are defined on raw counts");

  DatasetProfile p;
  p.dataset_id = m.id;
  p.granularity = m.granularity;
  p.reduction = reduction;

  double cv_sum = 0, b_sum = 0;
  for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
    Eigen::VectorXd row = m.values.row(i).transpose();
    try {
      ProfileRow pr{m.rows[std::size_t(i)], cv(row), burstiness(row)};
      p.per_row.push_back(pr);
      cv_sum += pr.cv;
      b_sum += pr.burstiness;
    } catch (const ZeroMean&) {
      p.excluded.push_back(m.rows[std::size_t(i)]);
    }
  }

  if (reduction == ProfileReduction::per_row_mean) {
    if (!p.per_row.empty()) {
      cv_sum /= double(p.per_row.size());
      b_sum /= double(p.per_row.size());
    }
    p.cv_mean = cv_sum;
    p.burstiness_mean = b_sum;
  } else {
    Eigen::Map<const Eigen::VectorXd> all(m.values.data(), m.values.size());
    p.cv_mean = cv(all);
    p.burstiness_mean = burstiness(all);
  }
  return p;
}

void write_profile_csv(const DatasetProfile& p, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "dataset,granularity,origin,cv,burstiness\n";
  for (const auto& pr : p.per_row)
    out << pr.row.dataset << ',' << to_string(p.granularity) << ','
        << cal::format_date(pr.row.origin) << ',' << csv::format_double(pr.cv) << ','
        << csv::format_double(pr.burstiness) << "\n";
  out << p.dataset_id << ',' << to_string(p.granularity) << ",summary,"
      << csv::format_double(p.cv_mean) << ',' << csv::format_double(p.burstiness_mean) << "\n";
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace loadshape
