#include "relaxlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace relaxlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 8-point Gauss-Legendre rule on [-1, 1] used by the composite convolution
// quadratures (computed once, Newton on P_8).
struct Gauss8 {
  std::vector<double> nodes;
  std::vector<double> weights;
  Gauss8() {
    const int n = 8;
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < n / 2; ++i) {
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
};

const Gauss8& gauss8() {
  static const Gauss8 rule;
  return rule;
}

// Uniform double in [0, 1) from the top 53 bits of a seeded generator;
// identical across platforms, unlike std::uniform_real_distribution.
double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

FourierField::FourierField(int d, int cutoff, int components)
    : d_(d), cutoff_(cutoff), components_(components) {
  if (d < 1 || d > 3) throw InvalidArgumentError("FourierField: d must be in [1, 3]");
  if (cutoff < 0) throw InvalidArgumentError("FourierField: cutoff must be >= 0");
  if (components < 1) throw InvalidArgumentError("FourierField: components must be >= 1");
  std::int64_t total = 1;
  for (int k = 0; k < d; ++k) total *= (2 * static_cast<std::int64_t>(cutoff) + 1);
  coeffs_.assign(total, ComplexVector::Zero(components));
}

Eigen::VectorXi FourierField::frequency(std::int64_t flat) const {
  Eigen::VectorXi xi(d_);
  const std::int64_t base = 2 * static_cast<std::int64_t>(cutoff_) + 1;
  for (int k = 0; k < d_; ++k) {
    xi[k] = static_cast<int>(flat % base) - cutoff_;
    flat /= base;
  }
  return xi;
}

std::int64_t FourierField::flat_index(const Eigen::VectorXi& xi) const {
  if (xi.size() != d_) throw InvalidArgumentError("FourierField: frequency dimension mismatch");
  const std::int64_t base = 2 * static_cast<std::int64_t>(cutoff_) + 1;
  std::int64_t flat = 0;
  for (int k = d_ - 1; k >= 0; --k) {
    if (std::abs(xi[k]) > cutoff_) {
      throw InvalidArgumentError("FourierField: frequency outside the lattice");
    }
    flat = flat * base + (xi[k] + cutoff_);
  }
  return flat;
}

double FourierField::frequency_norm_sq(std::int64_t flat) const {
  const Eigen::VectorXi xi = frequency(flat);
  double sq = 0.0;
  for (int k = 0; k < d_; ++k) sq += static_cast<double>(xi[k]) * xi[k];
  return sq;
}

double FourierField::l2_norm() const {
  double sum = 0.0;
  for (const auto& c : coeffs_) sum += c.squaredNorm();
  return std::sqrt(sum);
}

double FourierField::sobolev_norm(double s) const {
  double sum = 0.0;
  for (std::int64_t i = 0; i < mode_count(); ++i) {
    sum += std::pow(1.0 + frequency_norm_sq(i), s) * coeffs_[i].squaredNorm();
  }
  return std::sqrt(sum);
}

FourierField FourierField::head_components(int slow) const {
  if (slow < 1 || slow > components_) {
    throw InvalidArgumentError("FourierField: head size outside [1, components]");
  }
  FourierField out(d_, cutoff_, slow);
  for (std::int64_t i = 0; i < mode_count(); ++i) {
    out.coefficient(i) = coeffs_[i].head(slow);
  }
  return out;
}

FourierField make_initial_data(const InitialDataSpec& spec) {
  if (spec.cutoff < 1) throw InvalidArgumentError("make_initial_data: cutoff must be >= 1");
  FourierField field(spec.d, spec.cutoff, spec.n);
  std::mt19937_64 rng(spec.seed);
  const double exponent = -(spec.smoothness + spec.d) / 2.0 - 0.1;
  for (std::int64_t i = 0; i < field.mode_count(); ++i) {
    const double modulus = std::pow(1.0 + field.frequency_norm_sq(i), exponent);
    ComplexVector& c = field.coefficient(i);
    for (int k = 0; k < spec.n; ++k) {
      const double phase = 2.0 * kPi * unit_double(rng);
      c[k] = modulus * Complex(std::cos(phase), std::sin(phase));
    }
  }
  return field;
}

double truncation_tail_fraction(const InitialDataSpec& spec) {
  if (spec.d != 1) {
    throw InvalidArgumentError("truncation_tail_fraction: implemented for d = 1");
  }
  // Squared H^s terms are (1 + xi^2)^{-d - 0.2} regardless of s.
  const double power = -(spec.d + 0.2);
  const auto term = [power](double xi) { return std::pow(1.0 + xi * xi, power); };
  double head = term(0.0);
  for (int xi = 1; xi <= spec.cutoff; ++xi) head += 2.0 * term(xi);
  double tail = 0.0;
  const int far = 4'000'000;
  for (int xi = spec.cutoff + 1; xi <= far; ++xi) tail += 2.0 * term(xi);
  // Integral remainder past the summation horizon.
  tail += 2.0 * std::pow(static_cast<double>(far), 2.0 * power + 1.0) / (-2.0 * power - 1.0);
  return tail / (head + tail);
}

ComplexMatrix coupling_kernel(const RelaxationSystem& system, const BlockDecomposition& decomp,
                              double t, const Eigen::VectorXd& xi, double eta) {
  if (!(t >= 0.0)) throw InvalidArgumentError("coupling_kernel: t must be >= 0");
  const int slow = decomp.slow_dim();
  const int r = decomp.r;
  if (slow == 0 || r == 0) return ComplexMatrix::Zero(slow, r);

  const SymbolBlocks blocks = symbol(system, decomp, xi, eta);
  const int n = slow + r;
  ComplexMatrix augmented = ComplexMatrix::Zero(n, n);
  augmented.topLeftCorner(slow, slow) = blocks.H11;
  augmented.topRightCorner(slow, r) = blocks.H12;
  augmented.bottomRightCorner(r, r) = blocks.H22;
  return mat_exp(augmented, t).topRightCorner(slow, r);
}

ComplexMatrix coupling_kernel_quadrature(const RelaxationSystem& system,
                                         const BlockDecomposition& decomp, double t,
                                         const Eigen::VectorXd& xi, double eta, int panels) {
  if (!(t >= 0.0)) throw InvalidArgumentError("coupling_kernel_quadrature: t must be >= 0");
  if (panels < 4) throw InvalidArgumentError("coupling_kernel_quadrature: panels must be >= 4");
  const int slow = decomp.slow_dim();
  const int r = decomp.r;
  if (slow == 0 || r == 0 || t == 0.0) return ComplexMatrix::Zero(slow, r);

  const SymbolBlocks blocks = symbol(system, decomp, xi, eta);
  const Gauss8& rule = gauss8();
  ComplexMatrix accum = ComplexMatrix::Zero(slow, r);
  const double h = t / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = p * h;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double s = lo + 0.5 * h * (rule.nodes[i] + 1.0);
      accum += (0.5 * h * rule.weights[i]) *
               (mat_exp(blocks.H11, t - s) * blocks.H12 * mat_exp(blocks.H22, s));
    }
  }
  return accum;
}

FourierField full_solve(const RelaxationSystem& system, const BlockDecomposition& decomp,
                        const FourierField& U0, double t, double eta) {
  if (!(eta >= 0.0)) throw InvalidArgumentError("full_solve: eta must be >= 0");
  if (U0.components() != system.n) {
    throw InvalidArgumentError("full_solve: field must have n = " + std::to_string(system.n) +
                               " components");
  }
  if (U0.dim() != system.d) throw InvalidArgumentError("full_solve: field dimension mismatch");

  FourierField out(U0.dim(), U0.cutoff(), U0.components());
  for (std::int64_t i = 0; i < U0.mode_count(); ++i) {
    const Eigen::VectorXd xi = U0.frequency(i).cast<double>();
    const SymbolBlocks blocks = symbol(system, decomp, xi, eta);
    try {
      out.coefficient(i) = mat_exp(blocks.H, t) * U0.coefficient(i);
    } catch (const OverflowError& e) {
      std::ostringstream os;
      os << e.what() << " at frequency xi = " << xi.transpose() << ", eta = " << eta
         << " (direction not quasi-stable)";
      throw OverflowError(os.str());
    }
  }
  return out;
}

FourierField reduced_solve(const RelaxationSystem& system, const BlockDecomposition& decomp,
                           const FourierField& u0, double t) {
  const int slow = decomp.slow_dim();
  if (u0.components() != slow) {
    throw InvalidArgumentError("reduced_solve: field must have n - r = " + std::to_string(slow) +
                               " components");
  }
  FourierField out(u0.dim(), u0.cutoff(), slow);
  for (std::int64_t i = 0; i < u0.mode_count(); ++i) {
    const Eigen::VectorXd xi = u0.frequency(i).cast<double>();
    const SymbolBlocks blocks = symbol(system, decomp, xi, 0.0);
    out.coefficient(i) = mat_exp(blocks.H11, t) * u0.coefficient(i);
  }
  return out;
}

int eta_scaled_panels(double eta, double t, int minimum) {
  const double nodes = 8.0 * eta * t / kPi;
  return std::max(minimum, static_cast<int>(std::ceil(nodes / 8.0)));
}

double mz_residual(const RelaxationSystem& system, const BlockDecomposition& decomp,
                   const FourierField& U0, double t, double eta, int panels) {
  if (panels < 16) throw InvalidArgumentError("mz_residual: panels must be >= 16");
  if (!(t >= 0.0)) throw InvalidArgumentError("mz_residual: t must be >= 0");
  if (U0.components() != system.n) {
    throw InvalidArgumentError("mz_residual: field must have n components");
  }
  const int slow = decomp.slow_dim();
  const int r = decomp.r;
  if (slow == 0) throw InvalidArgumentError("mz_residual: system has no slow block");

  const Gauss8& rule = gauss8();
  double worst = 0.0;
  for (std::int64_t i = 0; i < U0.mode_count(); ++i) {
    const Eigen::VectorXd xi = U0.frequency(i).cast<double>();
    const SymbolBlocks blocks = symbol(system, decomp, xi, eta);
    const ComplexVector c0 = U0.coefficient(i);
    const ComplexVector u0 = c0.head(slow);
    const ComplexVector v0 = c0.tail(r);

    const ComplexVector lhs = (mat_exp(blocks.H, t) * c0).head(slow);

    ComplexVector rhs = mat_exp(blocks.H11, t) * u0;
    if (r > 0) {
      rhs += coupling_kernel(system, decomp, t, xi, eta) * v0;
      ComplexVector memory = ComplexVector::Zero(slow);
      const double h = t / panels;
      for (int p = 0; p < panels; ++p) {
        const double lo = p * h;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
          const double s = lo + 0.5 * h * (rule.nodes[q] + 1.0);
          const ComplexVector u_s = (mat_exp(blocks.H, s) * c0).head(slow);
          memory += (0.5 * h * rule.weights[q]) *
                    (coupling_kernel(system, decomp, t - s, xi, eta) * (blocks.H21 * u_s));
        }
      }
      rhs += memory;
    }
    worst = std::max(worst, (lhs - rhs).norm());
  }
  return worst;
}

ConvergenceRecord slow_error(const RelaxationSystem& system, const BlockDecomposition& decomp,
                             const FourierField& U0, double t, double epsilon, double beta_tilde) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw InvalidArgumentError("slow_error: epsilon must be in (0, 1)");
  }
  if (!(beta_tilde > 0.0)) throw InvalidArgumentError("slow_error: beta_tilde must be > 0");
  const int slow = decomp.slow_dim();
  if (slow == 0) throw InvalidArgumentError("slow_error: system has no slow block");

  const double eta = 1.0 / epsilon;
  const FourierField full = full_solve(system, decomp, U0, t, eta);
  const FourierField reduced = reduced_solve(system, decomp, U0.head_components(slow), t);

  const double cutoff = eta / beta_tilde - 1.0;  // Xi(eta)
  double low_sq = 0.0, high_sq = 0.0;
  for (std::int64_t i = 0; i < U0.mode_count(); ++i) {
    const double diff_sq =
        (full.coefficient(i).head(slow) - reduced.coefficient(i)).squaredNorm();
    if (std::sqrt(U0.frequency_norm_sq(i)) <= cutoff) {
      low_sq += diff_sq;
    } else {
      high_sq += diff_sq;
    }
  }

  ConvergenceRecord record;
  record.epsilon = epsilon;
  record.t = t;
  record.low_freq_error = std::sqrt(low_sq);
  record.high_freq_error = std::sqrt(high_sq);
  record.l2_error = std::sqrt(low_sq + high_sq);
  record.rate_ratio = record.l2_error / (epsilon * std::abs(std::log(epsilon)));
  record.h2_norm_u0 = U0.sobolev_norm(2.0);
  return record;
}

ConvergenceStudy convergence_study(const RelaxationSystem& system,
                                   const BlockDecomposition& decomp, const FourierField& U0,
                                   double t, const std::vector<double>& eps_list,
                                   double beta_tilde) {
  if (eps_list.empty()) throw InvalidArgumentError("convergence_study: eps list is empty");
  for (std::size_t i = 0; i + 1 < eps_list.size(); ++i) {
    if (!(eps_list[i + 1] < eps_list[i])) {
      throw InvalidArgumentError("convergence_study: eps list must be strictly decreasing");
    }
  }

  ConvergenceStudy study;
  for (double eps : eps_list) {
    study.records.push_back(slow_error(system, decomp, U0, t, eps, beta_tilde));
  }
  study.errors_strictly_decreasing = true;
  for (std::size_t i = 0; i + 1 < study.records.size(); ++i) {
    if (!(study.records[i + 1].l2_error < study.records[i].l2_error)) {
      study.errors_strictly_decreasing = false;
    }
  }
  study.ratio_max = 0.0;
  study.ratio_min = std::numeric_limits<double>::infinity();
  for (const auto& rec : study.records) {
    study.ratio_max = std::max(study.ratio_max, rec.rate_ratio);
    study.ratio_min = std::min(study.ratio_min, rec.rate_ratio);
  }
  return study;
}

}  // namespace relaxlab
