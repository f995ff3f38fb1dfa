#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <sstream>

#include "loadshape/errors.hpp"
#include "loadshape/preprocess.hpp"
#include "loadshape/rng.hpp"
#include "loadshape/stats.hpp"

#include "fixtures.hpp"

#include <doctest.h>

using namespace loadshape;

namespace {

WorkloadMatrix tiny_matrix() {
  WorkloadMatrix m;
  m.id = "d";
  m.granularity = Granularity::daily;
  m.values.resize(2, 24);
  auto g = rng::engine(21);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 24; ++j) m.values(i, j) = double(rng::uniform_index(g, 300) + 1);
  m.rows = {{"d", 0}, {"d", 86400}};
  return m;
}

}  // namespace

TEST_CASE("cv and burstiness on hand-computed vectors") {
  Eigen::VectorXd v(4);
  v << 2, 4, 6, 8;  // mean 5, population sigma sqrt(5)
  double s = std::sqrt(5.0);
  CHECK(cv(v) == doctest::Approx(s / 5.0).epsilon(1e-12));
  CHECK(burstiness(v) == doctest::Approx((s - 5.0) / (s + 5.0)).epsilon(1e-12));
}

TEST_CASE("constant load is perfectly regular") {
  Eigen::VectorXd flat = Eigen::VectorXd::Constant(24, 17.0);
  CHECK(cv(flat) == 0.0);
  CHECK(burstiness(flat) == -1.0);
}

TEST_CASE("sigma equal to mean gives zero burstiness") {
  // Half zeros, half 2m: mean m, population sigma m.
  Eigen::VectorXd v(10);
  v << 0, 0, 0, 0, 0, 6, 6, 6, 6, 6;
  CHECK(std::abs(burstiness(v)) < 1e-12);
  CHECK(cv(v) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("burstiness stays within its bounds") {
  auto g = rng::engine(33);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd v(12);
    for (int i = 0; i < 12; ++i) v[i] = double(rng::uniform_index(g, 1000));
    if (v.sum() == 0) continue;
    double b = burstiness(v);
    CHECK(b >= -1.0);
    CHECK(b <= 1.0);
  }
}

TEST_CASE("cv is scale-invariant, burstiness too") {
  auto g = rng::engine(34);
  Eigen::VectorXd v(24);
  for (int i = 0; i < 24; ++i) v[i] = rng::uniform(g, 1.0, 400.0);
  CHECK(cv(7.0 * v) == doctest::Approx(cv(v)).epsilon(1e-12));
  CHECK(burstiness(7.0 * v) == doctest::Approx(burstiness(v)).epsilon(1e-12));
}

TEST_CASE("all-zero rows are rejected") {
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(24);
  CHECK_THROWS_AS(cv(zero), ZeroMean);
  CHECK_THROWS_AS(burstiness(zero), ZeroMean);
}

TEST_CASE("per-row profile averages row metrics and excludes zero rows") {
  WorkloadMatrix m = tiny_matrix();
  Eigen::MatrixXd with_zero(3, 24);
  with_zero.topRows(2) = m.values;
  with_zero.row(2).setZero();
  m.values = with_zero;
  m.rows.push_back({"d", 2 * 86400});

  DatasetProfile p = profile(m);
  REQUIRE(p.per_row.size() == 2);
  REQUIRE(p.excluded.size() == 1);
  CHECK(p.excluded[0].origin == 2 * 86400);
  double cv0 = cv(m.values.row(0).transpose());
  double cv1 = cv(m.values.row(1).transpose());
  CHECK(p.cv_mean == doctest::Approx((cv0 + cv1) / 2.0).epsilon(1e-12));
  double b0 = burstiness(m.values.row(0).transpose());
  double b1 = burstiness(m.values.row(1).transpose());
  CHECK(p.burstiness_mean == doctest::Approx((b0 + b1) / 2.0).epsilon(1e-12));
}

TEST_CASE("whole-series profile pools every entry") {
  WorkloadMatrix m = tiny_matrix();
  DatasetProfile p = profile(m, ProfileReduction::whole_series);
  Eigen::VectorXd flat(m.values.size());
  int k = 0;
  for (Eigen::Index i = 0; i < m.values.rows(); ++i)
    for (Eigen::Index j = 0; j < m.values.cols(); ++j) flat[k++] = m.values(i, j);
  CHECK(p.cv_mean == doctest::Approx(cv(flat)).epsilon(1e-12));
  CHECK(p.burstiness_mean == doctest::Approx(burstiness(flat)).epsilon(1e-12));
}

TEST_CASE("profile refuses preprocessed input") {
  WorkloadMatrix m = tiny_matrix();
  PreprocessResult r = preprocess_matrix(m, {0.3, true});
  CHECK_THROWS_AS(profile(r.matrix), ProvenanceViolation);
}

TEST_CASE("profile csv carries per-row lines and a summary row") {
  auto dir = fixtures::scratch_dir("profile-csv");
  DatasetProfile p = profile(tiny_matrix());
  write_profile_csv(p, dir / "p.csv");

  std::ifstream in(dir / "p.csv");
  std::string line;
  int rows = 0;
  bool summary = false;
  REQUIRE(std::getline(in, line));
  CHECK(line == "dataset,granularity,origin,cv,burstiness");
  while (std::getline(in, line)) {
    if (line.find("summary") != std::string::npos)
      summary = true;
    else
      ++rows;
  }
  CHECK(rows == 2);
  CHECK(summary);
}
