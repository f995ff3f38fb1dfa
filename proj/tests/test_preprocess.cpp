#include <Eigen/Dense>

#include <cmath>

#include "loadshape/errors.hpp"
#include "loadshape/preprocess.hpp"
#include "loadshape/rng.hpp"

#include <doctest.h>

using namespace loadshape;

namespace {

Eigen::VectorXd random_row(int n, std::uint64_t seed) {
  auto g = rng::engine(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng::uniform(g, 1.0, 500.0);
  return v;
}

WorkloadMatrix daily_matrix(const Eigen::MatrixXd& values, const std::string& dataset = "d") {
  WorkloadMatrix m;
  m.id = dataset;
  m.granularity = Granularity::daily;
  m.values = values;
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    m.rows.push_back({dataset, i * 86400});
  return m;
}

}  // namespace

TEST_CASE("zscore centers to zero mean and unit population variance") {
  Eigen::VectorXd v = random_row(24, 1);
  Eigen::VectorXd z = zscore_row(v);
  CHECK(std::abs(z.mean()) < 1e-12);
  double var = z.squaredNorm() / double(z.size()) - z.mean() * z.mean();
  CHECK(std::abs(var - 1.0) < 1e-12);
}

TEST_CASE("zscore on a known vector") {
  Eigen::VectorXd v(4);
  v << 2, 4, 6, 8;  // mean 5, population sigma sqrt(5)
  Eigen::VectorXd z = zscore_row(v);
  double s = std::sqrt(5.0);
  CHECK(z[0] == doctest::Approx(-3.0 / s).epsilon(1e-12));
  CHECK(z[3] == doctest::Approx(3.0 / s).epsilon(1e-12));
}

TEST_CASE("zscore is invariant under affine rescaling") {
  Eigen::VectorXd v = random_row(24, 2);
  Eigen::VectorXd z = zscore_row(v);
  Eigen::VectorXd w = 3.5 * v.array() + 120.0;
  CHECK((zscore_row(w) - z).lpNorm<Eigen::Infinity>() < 1e-9);
  // Negating flips the shape.
  Eigen::VectorXd neg = zscore_row(-v);
  CHECK((neg + z).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("zscore rejects flat and too-short rows") {
  CHECK_THROWS_AS(zscore_row(Eigen::VectorXd::Constant(24, 7.0)), DegenerateRow);
  CHECK_THROWS_AS(zscore_row(Eigen::VectorXd::Constant(1, 3.0)), std::invalid_argument);
}

TEST_CASE("ema with alpha 1 is the identity") {
  Eigen::VectorXd v = random_row(24, 3);
  CHECK(ema(v, {1.0, true}) == v);
}

TEST_CASE("ema matches the recurrence") {
  Eigen::VectorXd v(4);
  v << 10, 20, 30, 40;
  Eigen::VectorXd s = ema(v, {0.3, true});
  CHECK(s[0] == 10.0);
  CHECK(s[1] == doctest::Approx(0.3 * 20 + 0.7 * 10).epsilon(1e-12));
  CHECK(s[2] == doctest::Approx(0.3 * 30 + 0.7 * s[1]).epsilon(1e-12));
  CHECK(s[3] == doctest::Approx(0.3 * 40 + 0.7 * s[2]).epsilon(1e-12));
}

TEST_CASE("ema prefix property: entry t depends only on entries up to t") {
  Eigen::VectorXd v = random_row(24, 4);
  Eigen::VectorXd full = ema(v, {0.3, true});
  for (int cut = 1; cut <= 24; ++cut) {
    Eigen::VectorXd part = ema(v.head(cut), {0.3, true});
    CHECK((part - full.head(cut)).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("ema validates alpha") {
  Eigen::VectorXd v = random_row(5, 5);
  CHECK_THROWS_AS(ema(v, {0.0, true}), std::invalid_argument);
  CHECK_THROWS_AS(ema(v, {1.5, true}), std::invalid_argument);
  // Alpha is validated even when smoothing is off; a valid one passes through.
  CHECK_THROWS_AS(ema(v, {0.0, false}), std::invalid_argument);
  CHECK(ema(v, {0.5, false}) == v);
}

TEST_CASE("preprocess standardizes then smooths and flips provenance") {
  Eigen::MatrixXd values(2, 24);
  values.row(0) = random_row(24, 6).transpose();
  values.row(1) = random_row(24, 7).transpose();
  WorkloadMatrix m = daily_matrix(values);

  SmoothingConfig cfg{0.3, true};
  PreprocessResult r = preprocess_matrix(m, cfg);
  CHECK(r.matrix.provenance == Provenance::preprocessed);
  CHECK(r.degenerate.empty());
  REQUIRE(r.matrix.values.rows() == 2);
  for (int i = 0; i < 2; ++i) {
    Eigen::VectorXd expect = ema(zscore_row(values.row(i).transpose()), cfg);
    CHECK((r.matrix.values.row(i).transpose() - expect).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("preprocess drops flat rows and itemizes them") {
  Eigen::MatrixXd values(3, 24);
  values.row(0) = random_row(24, 8).transpose();
  values.row(1).setConstant(42.0);
  values.row(2) = random_row(24, 9).transpose();
  WorkloadMatrix m = daily_matrix(values);

  PreprocessResult r = preprocess_matrix(m, {0.3, true});
  REQUIRE(r.matrix.values.rows() == 2);
  REQUIRE(r.degenerate.size() == 1);
  CHECK(r.degenerate[0].origin == 86400);
  CHECK(r.matrix.rows[0].origin == 0);
  CHECK(r.matrix.rows[1].origin == 2 * 86400);
}

TEST_CASE("preprocess throws when every row is flat") {
  WorkloadMatrix m = daily_matrix(Eigen::MatrixXd::Ones(2, 24));
  CHECK_THROWS_AS(preprocess_matrix(m, {0.3, true}), EmptyResult);
}

TEST_CASE("per-dataset scope shares moments within a dataset") {
  Eigen::MatrixXd values(2, 24);
  values.row(0) = random_row(24, 10).transpose();
  values.row(1) = 2.0 * random_row(24, 11).transpose();
  WorkloadMatrix m = daily_matrix(values, "one");

  PreprocessResult r = preprocess_matrix(m, {1.0, false}, StandardizeScope::per_dataset);
  // Pooled standardization: reassembling all entries gives zero mean and unit
  // population variance over the whole dataset, not per row.
  double mean = r.matrix.values.mean();
  double var = r.matrix.values.squaredNorm() / double(r.matrix.values.size()) - mean * mean;
  CHECK(std::abs(mean) < 1e-12);
  CHECK(std::abs(var - 1.0) < 1e-12);
  // Rows keep distinct means under the shared frame.
  CHECK(r.matrix.values.row(0).mean() != doctest::Approx(r.matrix.values.row(1).mean()));
}
