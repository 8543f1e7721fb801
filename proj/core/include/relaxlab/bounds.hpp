#pragma once

#include <map>
#include <optional>
#include <string>

#include "relaxlab/linalg.hpp"
#include "relaxlab/relaxation.hpp"

namespace relaxlab {

/// Parameters of the elementary integral
///   I(a1, a2, b1, b2) = int_R dy / ((|y - a1| + b1) (|y - a2| + b2)).
struct IntegralQuery {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double beta1 = 1.0;
  double beta2 = 1.0;
};

/// Adaptive Gauss-Kronrod quadrature on the three smooth pieces split at
/// alpha1, alpha2, plus analytic log-antiderivative tails. rel_tol in (0, 1e-4].
double integral_I(const IntegralQuery& q, double rel_tol);

/// Closed form: available when beta1 = beta2 (both branches in d) or
/// alpha1 = alpha2; absent otherwise.
std::optional<double> integral_I_closed(const IntegralQuery& q);

/// Result of a single inequality check, with every constant that entered the
/// right-hand side recorded for audit.
struct BoundCheckResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  std::map<std::string, double> constants;
};

/// lhs = I(q) by quadrature at 1e-10; rhs = the applicable bound
/// (2/beta for equal betas, else min of the log-difference bound and
/// 2/min(beta1, beta2)).
BoundCheckResult check_lemma_3_1(const IntegralQuery& q);

/// The spectral gap of an invertible quasi-stable matrix: the largest delta
/// such that every eigenvalue has Re <= -delta or |Im| >= delta, i.e.
/// min over the spectrum of max(-Re, |Im|).
double delta_of(const ComplexMatrix& B, double rel_tol = kDefaultRelTol);

/// Vector-valued smooth function on [0, T] in a fixed basis (polynomial or
/// trigonometric, degree <= 8), so that derivatives and C^1 data come from
/// the coefficients rather than from black-box sampling.
class SmoothFunction {
 public:
  enum class Basis { polynomial, trigonometric };

  /// f(s) = sum_k coeffs.col(k) s^k, degree = cols - 1 <= 8.
  static SmoothFunction polynomial(const Eigen::MatrixXcd& coeffs);

  /// f(s) = coeffs.col(0) + sum_{k >= 1} coeffs.col(2k-1) cos(k w s)
  ///                       + coeffs.col(2k) sin(k w s), harmonics <= 8.
  static SmoothFunction trigonometric(const Eigen::MatrixXcd& coeffs, double omega);

  int dim() const { return static_cast<int>(coeffs_.rows()); }
  Basis basis() const { return basis_; }

  ComplexVector value(double s) const;
  ComplexVector derivative(double s) const;

  /// max(sup |f|, sup |f'|) on [0, T], evaluated from the exact derivative on
  /// a dense grid.
  double c1_norm(double T, int samples = 4096) const;

 private:
  SmoothFunction(Basis basis, Eigen::MatrixXcd coeffs, double omega);
  Basis basis_;
  Eigen::MatrixXcd coeffs_;
  double omega_ = 0.0;
};

/// One instance of the generalized Riemann-Lebesgue estimate: the matrix
/// eta B + M drives the exponential, f is the smooth factor.
struct GrlCase {
  ComplexMatrix B;  // invertible and quasi-stable
  ComplexMatrix M;
  SmoothFunction f;
  double T = 1.0;
  double eta = 0.0;
};

/// Checks || int_0^T exp((eta B + M)(T-s)) f(s) ds || against
/// 32 sqrt(2) r K e^{gamma T} / (pi eta delta) * ||f||_C1 * log((eta delta + gamma)/gamma)
/// with K the sampled Kreiss measurement of B, delta = delta_of(B), and
/// gamma = 2 K ||M|| + 1. Requires eta >= 6 gamma / delta; the error message
/// states the required threshold.
BoundCheckResult grl_check(const GrlCase& kase);

/// Constants shared by a sweep of coupling-kernel bound checks: the
/// single-matrix constants of B plus (when the F1/F2 scans pass) the sampled
/// family constant over fast-block directions.
struct GBoundConstants {
  double K_B = 0.0;
  double delta_B = 0.0;
  double beta_tilde = 10.0;
  bool family_available = false;  // F1 and F2 scans passed
  double K_family = 0.0;          // sampled sup of K over unit fast-block directions
  double delta_tilde = 0.0;       // instantiated as delta_B / 2, verified per call
  double slow_factor_c1 = 0.0;    // sup over unit directions of C^1 data of e^{H11 s} H12
};

GBoundConstants instantiate_g_bound_constants(const RelaxationSystem& system,
                                              const BlockDecomposition& decomp,
                                              double beta_tilde = 10.0, int directions = 64,
                                              double t_max = 50.0);

/// Checks ||G(t, xi, eta)|| against the Riemann-Lebesgue machinery applied to
/// f(s) = e^{H11 s} H12 columnwise. Uses the eta-uniform family bound
/// C |xi| e^t / eta * log(eta delta_tilde + 1) whenever its preconditions
/// verify for this (xi, eta), else the single-matrix bound with
/// gamma = 2 K ||H22(xi, 0)|| + 1. All constants are recorded.
BoundCheckResult g_bound_check(const RelaxationSystem& system, const BlockDecomposition& decomp,
                               double t, const Eigen::VectorXd& xi, double eta,
                               const GBoundConstants& constants);

/// Convenience overload instantiating the constants on the fly.
BoundCheckResult g_bound_check(const RelaxationSystem& system, const BlockDecomposition& decomp,
                               double t, const Eigen::VectorXd& xi, double eta);

}  // namespace relaxlab
