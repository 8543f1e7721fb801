#include "relaxlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <limits>
#include <sstream>

#include "relaxlab/spectral.hpp"
#include "relaxlab/stability.hpp"

namespace relaxlab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;

// QUADPACK G7-K15 nodes and weights on [-1, 1] (positive half; symmetric).
constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kGaussWeights[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                                     0.417959183673469};

struct PanelEstimate {
  double integral = 0.0;
  double error = 0.0;
};

PanelEstimate gauss_kronrod_15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double kronrod = kKronrodWeights[7] * f(center);
  double gauss = kGaussWeights[3] * f(center);
  for (int i = 0; i < 7; ++i) {
    const double lo = f(center - half * kKronrodNodes[i]);
    const double hi = f(center + half * kKronrodNodes[i]);
    kronrod += kKronrodWeights[i] * (lo + hi);
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * (lo + hi);
  }
  PanelEstimate out;
  out.integral = kronrod * half;
  out.error = std::abs(kronrod - gauss) * half;
  return out;
}

// Globally adaptive: repeatedly bisect the panel with the largest error
// estimate until the summed error meets the budget (or the panel count /
// width floor is reached, whichever is first).
double adaptive_quadrature(const std::function<double(double)>& f, double a, double b,
                           double abs_tol) {
  struct Panel {
    double a, b, integral, error;
    bool operator<(const Panel& other) const { return error < other.error; }
  };

  const auto make_panel = [&f](double lo, double hi) {
    const PanelEstimate est = gauss_kronrod_15(f, lo, hi);
    return Panel{lo, hi, est.integral, est.error};
  };

  std::priority_queue<Panel> queue;
  queue.push(make_panel(a, b));
  double total_error = queue.top().error;

  const int max_panels = 4000;
  for (int iter = 0; total_error > abs_tol && iter < max_panels; ++iter) {
    const Panel worst = queue.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a) || !(mid < worst.b)) break;  // width at rounding floor
    queue.pop();
    const Panel left = make_panel(worst.a, mid);
    const Panel right = make_panel(mid, worst.b);
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }

  double sum = 0.0;
  while (!queue.empty()) {
    sum += queue.top().integral;
    queue.pop();
  }
  return sum;
}

// int_R^inf dy / ((y - p)(y - q)) for R > max(p, q), via the log antiderivative.
double tail_integral(double R, double p, double q) {
  const double dp = R - p;
  const double diff = p - q;
  const double u = diff / dp;  // log((R-q)/(R-p)) = log1p(u)
  if (std::abs(u) < 1e-8) return (1.0 - 0.5 * u + u * u / 3.0) / dp;
  return std::log1p(u) / diff;
}

// n-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p = 1.0, pm = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double tmp = p;
        p = ((2.0 * k - 1.0) * z * p - (k - 1.0) * pm) / k;
        pm = tmp;
      }
      dp = n * (z * p - pm) / (z * z - 1.0);
      const double step = p / dp;
      z -= step;
      if (std::abs(step) < 1e-15) break;
    }
    nodes[i] = -z;
    nodes[n - 1 - i] = z;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace

double integral_I(const IntegralQuery& q, double rel_tol) {
  if (!(q.beta1 > 0.0) || !(q.beta2 > 0.0)) {
    throw InvalidArgumentError("integral_I: beta1, beta2 must be > 0");
  }
  if (!(rel_tol > 0.0) || rel_tol > 1e-4) {
    throw InvalidArgumentError("integral_I: rel_tol must be in (0, 1e-4]");
  }

  const double a = std::min(q.alpha1, q.alpha2);
  const double b = std::max(q.alpha1, q.alpha2);
  const double span = std::max({q.beta1, q.beta2, b - a, 1.0});
  const double L = a - 10.0 * span;
  const double R = b + 10.0 * span;

  const auto integrand = [&q](double y) {
    return 1.0 / ((std::abs(y - q.alpha1) + q.beta1) * (std::abs(y - q.alpha2) + q.beta2));
  };

  // Tails are exact: beyond [L, R] both absolute values open the same way.
  const double tail_right = tail_integral(R, q.alpha1 - q.beta1, q.alpha2 - q.beta2);
  const double tail_left = tail_integral(-L, -(q.alpha1 + q.beta1), -(q.alpha2 + q.beta2));

  double rough = tail_left + tail_right;
  rough += gauss_kronrod_15(integrand, L, a).integral;
  if (b > a) rough += gauss_kronrod_15(integrand, a, b).integral;
  rough += gauss_kronrod_15(integrand, b, R).integral;

  const double abs_tol = rel_tol * std::max(rough, std::numeric_limits<double>::min()) / 8.0;
  double total = tail_left + tail_right;
  total += adaptive_quadrature(integrand, L, a, abs_tol);
  if (b > a) total += adaptive_quadrature(integrand, a, b, abs_tol);
  total += adaptive_quadrature(integrand, b, R, abs_tol);
  return total;
}

std::optional<double> integral_I_closed(const IntegralQuery& q) {
  if (!(q.beta1 > 0.0) || !(q.beta2 > 0.0)) {
    throw InvalidArgumentError("integral_I_closed: beta1, beta2 must be > 0");
  }
  if (q.beta1 == q.beta2) {
    const double beta = q.beta1;
    const double d = std::abs(q.alpha1 - q.alpha2) / beta;
    if (d == 0.0) return 2.0 / beta;
    return 4.0 * (d + 1.0) * std::log(d + 1.0) / (beta * d * (d + 2.0));
  }
  if (q.alpha1 == q.alpha2) {
    return 2.0 * (std::log(q.beta1) - std::log(q.beta2)) / (q.beta1 - q.beta2);
  }
  return std::nullopt;
}

BoundCheckResult check_lemma_3_1(const IntegralQuery& q) {
  BoundCheckResult result;
  result.lhs = integral_I(q, 1e-10);

  const double beta_min = std::min(q.beta1, q.beta2);
  double rhs;
  if (q.beta1 == q.beta2) {
    rhs = 2.0 / q.beta1;
  } else {
    const double log_bound = 2.0 * (std::log(q.beta1) - std::log(q.beta2)) / (q.beta1 - q.beta2);
    rhs = std::min(log_bound, 2.0 / beta_min);
    result.constants["log_difference_bound"] = log_bound;
  }
  result.rhs = rhs;
  // The d = 0 branch is an equality; allow for the quadrature tolerance.
  result.holds = result.lhs <= rhs * (1.0 + 1e-8);
  result.constants["alpha1"] = q.alpha1;
  result.constants["alpha2"] = q.alpha2;
  result.constants["beta1"] = q.beta1;
  result.constants["beta2"] = q.beta2;
  result.constants["d"] = std::abs(q.alpha1 - q.alpha2) / std::max(q.beta1, q.beta2);
  result.constants["quad_rel_tol"] = 1e-10;
  return result;
}

double delta_of(const ComplexMatrix& B, double rel_tol) {
  ensure_square(B, "delta_of");
  const Spectrum spec = spectrum(B, rel_tol);
  if (spec.min_abs() <= spec.clustering_tol) {
    throw PreconditionError("delta_of: B is singular at tolerance");
  }
  if (!is_quasi_stable(B, rel_tol).quasi_stable) {
    throw PreconditionError("delta_of: B is not quasi-stable");
  }
  double delta = std::numeric_limits<double>::infinity();
  for (const auto& c : spec.clusters) {
    delta = std::min(delta, std::max(-c.value.real(), std::abs(c.value.imag())));
  }
  return delta;
}

SmoothFunction::SmoothFunction(Basis basis, Eigen::MatrixXcd coeffs, double omega)
    : basis_(basis), coeffs_(std::move(coeffs)), omega_(omega) {}

SmoothFunction SmoothFunction::polynomial(const Eigen::MatrixXcd& coeffs) {
  if (coeffs.rows() < 1 || coeffs.cols() < 1 || coeffs.cols() > 9) {
    throw InvalidArgumentError("SmoothFunction: polynomial degree must be <= 8");
  }
  return SmoothFunction(Basis::polynomial, coeffs, 0.0);
}

SmoothFunction SmoothFunction::trigonometric(const Eigen::MatrixXcd& coeffs, double omega) {
  if (coeffs.rows() < 1 || coeffs.cols() < 1 || coeffs.cols() > 17) {
    throw InvalidArgumentError("SmoothFunction: trigonometric harmonics must be <= 8");
  }
  if (!(omega > 0.0)) throw InvalidArgumentError("SmoothFunction: omega must be > 0");
  return SmoothFunction(Basis::trigonometric, coeffs, omega);
}

ComplexVector SmoothFunction::value(double s) const {
  ComplexVector out = ComplexVector::Zero(coeffs_.rows());
  if (basis_ == Basis::polynomial) {
    double power = 1.0;
    for (int k = 0; k < coeffs_.cols(); ++k) {
      out += coeffs_.col(k) * power;
      power *= s;
    }
  } else {
    out = coeffs_.col(0);
    for (int k = 1; 2 * k - 1 < coeffs_.cols(); ++k) {
      out += coeffs_.col(2 * k - 1) * std::cos(k * omega_ * s);
      if (2 * k < coeffs_.cols()) out += coeffs_.col(2 * k) * std::sin(k * omega_ * s);
    }
  }
  return out;
}

ComplexVector SmoothFunction::derivative(double s) const {
  ComplexVector out = ComplexVector::Zero(coeffs_.rows());
  if (basis_ == Basis::polynomial) {
    double power = 1.0;
    for (int k = 1; k < coeffs_.cols(); ++k) {
      out += coeffs_.col(k) * (static_cast<double>(k) * power);
      power *= s;
    }
  } else {
    for (int k = 1; 2 * k - 1 < coeffs_.cols(); ++k) {
      const double w = k * omega_;
      out -= coeffs_.col(2 * k - 1) * (w * std::sin(w * s));
      if (2 * k < coeffs_.cols()) out += coeffs_.col(2 * k) * (w * std::cos(w * s));
    }
  }
  return out;
}

double SmoothFunction::c1_norm(double T, int samples) const {
  double worst = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double s = T * i / samples;
    worst = std::max({worst, value(s).norm(), derivative(s).norm()});
  }
  return worst;
}

BoundCheckResult grl_check(const GrlCase& kase) {
  ensure_square(kase.B, "grl_check");
  ensure_square(kase.M, "grl_check");
  if (kase.B.rows() != kase.M.rows()) {
    throw InvalidArgumentError("grl_check: B and M must have the same dimension");
  }
  if (kase.f.dim() != kase.B.rows()) {
    throw InvalidArgumentError("grl_check: f must take values in the dimension of B");
  }
  if (!(kase.T > 0.0)) throw InvalidArgumentError("grl_check: T must be > 0");
  if (!(kase.eta > 0.0)) throw InvalidArgumentError("grl_check: eta must be > 0");

  const int r = static_cast<int>(kase.B.rows());
  const KreissEstimate kreiss = kreiss_measure(kase.B);
  if (kreiss.infinite || kreiss.divergent) {
    throw PreconditionError("grl_check: B is not quasi-stable");
  }
  const double K = kreiss.value;
  const double delta = delta_of(kase.B);
  const double gamma = 2.0 * K * operator_norm(kase.M) + 1.0;
  const double eta_min = 6.0 * gamma / delta;
  if (kase.eta < eta_min) {
    std::ostringstream os;
    os << "grl_check: eta = " << kase.eta << " is below the required threshold 6 gamma / delta = "
       << eta_min;
    throw PreconditionError(os.str());
  }

  // Left side: composite Gauss-Legendre with the node count scaled to the
  // oscillation/decay scale eta on [0, T].
  const int total_nodes =
      std::max(64, static_cast<int>(std::ceil(8.0 * kase.eta * kase.T / kPi)));
  const int per_panel = 16;
  const int panels = (total_nodes + per_panel - 1) / per_panel;
  std::vector<double> nodes, weights;
  gauss_legendre(per_panel, nodes, weights);

  const ComplexMatrix A = kase.eta * kase.B + kase.M;
  ComplexVector accum = ComplexVector::Zero(r);
  const double h = kase.T / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = p * h;
    for (int i = 0; i < per_panel; ++i) {
      const double s = lo + 0.5 * h * (nodes[i] + 1.0);
      accum += (0.5 * h * weights[i]) * (mat_exp(A, kase.T - s) * kase.f.value(s));
    }
  }

  BoundCheckResult result;
  result.lhs = accum.norm();
  const double f_c1 = kase.f.c1_norm(kase.T);
  result.rhs = 32.0 * kSqrt2 * r * K * std::exp(gamma * kase.T) / (kPi * kase.eta * delta) * f_c1 *
               std::log((kase.eta * delta + gamma) / gamma);
  result.holds = result.lhs <= result.rhs;
  result.constants["K"] = K;
  result.constants["delta"] = delta;
  result.constants["gamma"] = gamma;
  result.constants["eta"] = kase.eta;
  result.constants["eta_min"] = eta_min;
  result.constants["T"] = kase.T;
  result.constants["r"] = r;
  result.constants["f_c1"] = f_c1;
  result.constants["quadrature_nodes"] = panels * per_panel;
  return result;
}

GBoundConstants instantiate_g_bound_constants(const RelaxationSystem& system,
                                              const BlockDecomposition& decomp, double beta_tilde,
                                              int directions, double t_max) {
  GBoundConstants out;
  out.beta_tilde = beta_tilde;
  if (decomp.r == 0 || decomp.slow_dim() == 0) return out;

  const KreissEstimate kb = kreiss_measure(decomp.B);
  if (kb.infinite || kb.divergent) {
    throw PreconditionError("g_bound: fast block B is not quasi-stable");
  }
  out.K_B = kb.value;
  out.delta_B = delta_of(decomp.B);
  out.delta_tilde = out.delta_B / 2.0;

  const FamilyScanReport f1 = family_scan(system, decomp, Family::F1, directions, t_max, 128);
  const FamilyScanReport f2 = family_scan(system, decomp, Family::F2, directions, t_max, 128);
  out.family_available = f1.all_quasi_stable && f2.all_quasi_stable;
  if (!out.family_available) return out;

  // Sampled family constant: sup of K over unit fast-block directions
  // (K is scale-invariant, so unit directions cover every ray).
  KreissGrid light;
  light.re_points = 24;
  light.im_points = 6;
  light.ring_radii = 5;
  light.refinements = 1;
  double k_family = out.K_B;
  for (const auto& row : f2.rows) {
    const SymbolBlocks blocks = symbol(system, decomp, row.xi, row.eta);
    const KreissEstimate ke = kreiss_measure(blocks.H22, light);
    if (!ke.infinite && std::isfinite(ke.value)) k_family = std::max(k_family, ke.value);
  }
  out.K_family = k_family;

  // C^1 data of the slow factor e^{H11 u} H12 over unit directions, u >= 0
  // sampled to t_max (F1 uniform quasi-stability keeps it bounded).
  double c1 = 0.0;
  for (const auto& row : f1.rows) {
    const SymbolBlocks blocks = symbol(system, decomp, row.xi, 0.0);
    for (int i = 0; i <= 256; ++i) {
      const double u = t_max * i / 256.0;
      const ComplexMatrix g = mat_exp(blocks.H11, u) * blocks.H12;
      c1 = std::max({c1, operator_norm(g), operator_norm(blocks.H11 * g)});
    }
  }
  out.slow_factor_c1 = c1;
  return out;
}

BoundCheckResult g_bound_check(const RelaxationSystem& system, const BlockDecomposition& decomp,
                               double t, const Eigen::VectorXd& xi, double eta,
                               const GBoundConstants& constants) {
  if (!(t >= 0.0)) throw InvalidArgumentError("g_bound_check: t must be >= 0");
  if (!(eta > 0.0)) throw InvalidArgumentError("g_bound_check: eta must be > 0");

  BoundCheckResult result;
  if (decomp.r == 0 || decomp.slow_dim() == 0) {
    result.holds = true;
    return result;
  }

  const int r = decomp.r;
  const int slow = decomp.slow_dim();
  const SymbolBlocks blocks = symbol(system, decomp, xi, eta);
  const ComplexMatrix G = coupling_kernel(system, decomp, t, xi, eta);
  result.lhs = operator_norm(G);

  const double xi_norm = xi.norm();
  const double col_factor = std::sqrt(static_cast<double>(slow));

  // eta-uniform family bound, applicable when the F1/F2 machinery is in
  // place, eta > beta_tilde (|xi| + 1), and the instantiated delta_tilde is
  // actually a spectral gap of this H22.
  bool family_applies = constants.family_available && eta > constants.beta_tilde * (xi_norm + 1.0);
  if (family_applies) {
    const Spectrum spec22 = spectrum(blocks.H22);
    for (const auto& c : spec22.clusters) {
      if (std::max(-c.value.real(), std::abs(c.value.imag())) < eta * constants.delta_tilde) {
        family_applies = false;
        break;
      }
    }
  }
  if (family_applies) {
    const double rhs2 = col_factor * 16.0 * kSqrt2 * r * constants.K_family * std::exp(t) /
                        (kPi * eta * constants.delta_tilde) * xi_norm * constants.slow_factor_c1 *
                        std::log(eta * constants.delta_tilde + 1.0);
    result.constants["rhs_family"] = rhs2;
    result.rhs = rhs2;
  }

  // Single-matrix bound with gamma = 2 K ||H22(xi, 0)|| + 1.
  const ComplexMatrix M22 = symbol(system, decomp, xi, 0.0).H22;
  const double gamma = 2.0 * constants.K_B * operator_norm(M22) + 1.0;
  const double eta_min = 6.0 * gamma / constants.delta_B;
  if (eta >= eta_min) {
    double f_c1 = 0.0;
    for (int i = 0; i <= 1024; ++i) {
      const double s = t * i / 1024.0;
      const ComplexMatrix g = mat_exp(blocks.H11, s) * blocks.H12;
      f_c1 = std::max({f_c1, operator_norm(g), operator_norm(blocks.H11 * g)});
    }
    const double rhs1 = col_factor * 32.0 * kSqrt2 * r * constants.K_B *
                        std::exp(gamma * t) / (kPi * eta * constants.delta_B) * f_c1 *
                        std::log((eta * constants.delta_B + gamma) / gamma);
    result.constants["rhs_single"] = rhs1;
    result.constants["f_c1"] = f_c1;
    if (!family_applies) result.rhs = rhs1;
  } else if (!family_applies) {
    std::ostringstream os;
    os << "g_bound_check: eta = " << eta << " is below both thresholds (single-matrix bound needs "
       << eta_min << ", family bound needs " << constants.beta_tilde * (xi_norm + 1.0) << ")";
    throw PreconditionError(os.str());
  }

  result.holds = result.lhs <= result.rhs;
  result.constants["K_B"] = constants.K_B;
  result.constants["delta_B"] = constants.delta_B;
  result.constants["gamma"] = gamma;
  result.constants["eta"] = eta;
  result.constants["xi_norm"] = xi_norm;
  result.constants["t"] = t;
  result.constants["family_bound_used"] = family_applies ? 1.0 : 0.0;
  if (constants.family_available) {
    result.constants["K_family"] = constants.K_family;
    result.constants["delta_tilde"] = constants.delta_tilde;
    result.constants["slow_factor_c1"] = constants.slow_factor_c1;
  }

  // Observed decay of ||G|| in eta, for the record.
  const double g_twice = operator_norm(coupling_kernel(system, decomp, t, xi, 2.0 * eta));
  if (result.lhs > 0.0 && g_twice > 0.0) {
    result.constants["observed_decay_exponent"] = std::log(result.lhs / g_twice) / std::log(2.0);
  }
  return result;
}

BoundCheckResult g_bound_check(const RelaxationSystem& system, const BlockDecomposition& decomp,
                               double t, const Eigen::VectorXd& xi, double eta) {
  return g_bound_check(system, decomp, t, xi, eta,
                       instantiate_g_bound_constants(system, decomp));
}

}  // namespace relaxlab
