#pragma once

#include <Eigen/Core>

namespace loadshape {

struct PolynomialModel {
  int degree = 2;                 // 2 or 3
  Eigen::VectorXd coefficients;   // degree+1 entries, highest power first
  double domain_lo = 0;           // half-open [lo, hi) in pattern time units
  double domain_hi = 0;
  double rmse = 0;
};

/// Least-squares polynomial fit by Levenberg-Marquardt: damping starts at
/// 1e-3, x10 on a rejected step, /10 on an accepted one, stopping when the
/// step norm drops below 1e-10 or after 200 iterations. The problem is
/// linear, so the result is cross-checked against the closed-form solution
/// and FitDivergence raised if any coefficient is off by more than 1e-6.
/// Throws RankDeficient when t has repeated points (degenerate grid).
/// The fitted domain defaults to [min(t), max(t)+1).
PolynomialModel fit_polynomial(const Eigen::Ref<const Eigen::VectorXd>& y, int degree,
                               const Eigen::Ref<const Eigen::VectorXd>& t);
PolynomialModel fit_polynomial(const Eigen::Ref<const Eigen::VectorXd>& y, int degree,
                               const Eigen::Ref<const Eigen::VectorXd>& t, double domain_lo,
                               double domain_hi);

/// Horner evaluation. Out-of-domain t is allowed; shapes extrapolate.
double evaluate(const PolynomialModel& p, double t);

}  // namespace loadshape
