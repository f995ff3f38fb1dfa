#include "loadshape/polyfit.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <set>
#include <stdexcept>

#include "loadshape/errors.hpp"

namespace loadshape {

namespace {

/// Vandermonde with highest power first, matching coefficient order.
Eigen::MatrixXd design_matrix(const Eigen::Ref<const Eigen::VectorXd>& t, int degree) {
  Eigen::MatrixXd v(t.size(), degree + 1);
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    double p = 1;
    for (int j = degree; j >= 0; --j) {
      v(i, j) = p;
      p *= t[i];
    }
  }
  return v;
}

}  // namespace

PolynomialModel fit_polynomial(const Eigen::Ref<const Eigen::VectorXd>& y, int degree,
                               const Eigen::Ref<const Eigen::VectorXd>& t) {
  return fit_polynomial(y, degree, t, t.minCoeff(), t.maxCoeff() + 1);
}

PolynomialModel fit_polynomial(const Eigen::Ref<const Eigen::VectorXd>& y, int degree,
                               const Eigen::Ref<const Eigen::VectorXd>& t, double domain_lo,
                               double domain_hi) {
  if (degree != 2 && degree != 3) throw std::invalid_argument("degree must be 2 or 3");
  if (y.size() != t.size()) throw LengthMismatch("y and t grids differ in length");
  if (y.size() < degree + 2)
    throw std::invalid_argument("fit needs at least degree+2 samples");
  {
    std::set<double> distinct(t.begin(), t.end());
    if (int(distinct.size()) < degree + 1)
      throw RankDeficient("t grid has too few distinct points");
  }

  const Eigen::MatrixXd J = design_matrix(t, degree);  // constant: model is linear in c

  auto sse = [&](const Eigen::VectorXd& c) { return (J * c - y).squaredNorm(); };

  Eigen::VectorXd c = Eigen::VectorXd::Zero(degree + 1);
  double current = sse(c);
  double lambda = 1e-3;
  const Eigen::MatrixXd jtj = J.transpose() * J;
  for (int iter = 0; iter < 200; ++iter) {
    Eigen::VectorXd g = J.transpose() * (J * c - y);
    Eigen::MatrixXd damped = jtj;
    damped.diagonal().array() += lambda;
    Eigen::VectorXd step = damped.ldlt().solve(-g);
    double trial = sse(c + step);
    if (trial < current) {
      c += step;
      current = trial;
      lambda /= 10;
      if (step.norm() < 1e-10) break;
    } else {
      lambda *= 10;
    }
  }

  // Closed-form oracle: the objective is linear least squares, so LM must
  // land on the same optimum.
  Eigen::VectorXd closed = J.colPivHouseholderQr().solve(y);
  if (((c - closed).array().abs() > 1e-6).any())
    throw FitDivergence("iterative fit disagrees with the closed-form solution");

  PolynomialModel model;
  model.degree = degree;
  model.coefficients = c;
  model.domain_lo = domain_lo;
  model.domain_hi = domain_hi;
  model.rmse = std::sqrt(current / double(y.size()));
  return model;
}

double evaluate(const PolynomialModel& p, double t) {
  double acc = 0;
  for (Eigen::Index i = 0; i < p.coefficients.size(); ++i) acc = acc * t + p.coefficients[i];
  return acc;
}

}  // namespace loadshape
