#pragma once

#include <cstdint>
#include <vector>

#include "relaxlab/linalg.hpp"
#include "relaxlab/relaxation.hpp"

namespace relaxlab {

/// Truncated lattice of Fourier coefficients on the periodic box [0, 2pi)^d:
/// one complex state vector per frequency xi in Z^d with |xi|_inf <= cutoff.
/// All norms are Parseval sums; no spatial grid is ever materialized.
class FourierField {
 public:
  FourierField(int d, int cutoff, int components);

  int dim() const { return d_; }
  int cutoff() const { return cutoff_; }
  int components() const { return components_; }
  std::int64_t mode_count() const { return static_cast<std::int64_t>(coeffs_.size()); }

  ComplexVector& coefficient(std::int64_t flat) { return coeffs_[flat]; }
  const ComplexVector& coefficient(std::int64_t flat) const { return coeffs_[flat]; }

  /// Lattice frequency of a flat index, each entry in [-cutoff, cutoff].
  Eigen::VectorXi frequency(std::int64_t flat) const;
  std::int64_t flat_index(const Eigen::VectorXi& xi) const;
  double frequency_norm_sq(std::int64_t flat) const;  // |xi|_2^2

  double l2_norm() const;
  double sobolev_norm(double s) const;  // sqrt(sum (1 + |xi|^2)^s ||c||^2)

  /// First `slow` components of every coefficient.
  FourierField head_components(int slow) const;

 private:
  int d_;
  int cutoff_;
  int components_;
  std::vector<ComplexVector> coeffs_;
};

struct InitialDataSpec {
  int d = 1;
  int n = 2;
  int cutoff = 64;
  double smoothness = 2.0;  // s: coefficient modulus (1 + |xi|^2)^{-(s+d)/2 - 0.1}
  std::uint64_t seed = 0;
};

/// Deterministic seeded data: per-component modulus (1 + |xi|^2)^{-(s+d)/2-0.1}
/// times seeded unit-modulus phases. Same seed, same field, bit for bit.
FourierField make_initial_data(const InitialDataSpec& spec);

/// Fraction of the squared H^s norm lost to the lattice truncation at the
/// spec's cutoff, from the analytic coefficient profile (d = 1).
double truncation_tail_fraction(const InitialDataSpec& spec);

/// G(t, xi, eta) = int_0^t e^{H11 (t-s)} H12 e^{H22 s} ds, computed exactly
/// (to mat_exp accuracy) as the upper-right block of the exponential of the
/// augmented matrix [[H11, H12], [0, H22]] t.
ComplexMatrix coupling_kernel(const RelaxationSystem& system, const BlockDecomposition& decomp,
                              double t, const Eigen::VectorXd& xi, double eta);

/// Composite Gauss-Legendre discretization of the same convolution; the
/// independent oracle for coupling_kernel. panels >= 4.
ComplexMatrix coupling_kernel_quadrature(const RelaxationSystem& system,
                                         const BlockDecomposition& decomp, double t,
                                         const Eigen::VectorXd& xi, double eta, int panels);

/// Per-frequency exact propagation U(t, xi) = exp(H(xi, eta) t) U0(xi) in the
/// transformed coordinates of the decomposition.
FourierField full_solve(const RelaxationSystem& system, const BlockDecomposition& decomp,
                        const FourierField& U0, double t, double eta);

/// Per-frequency propagation of the slow block by exp(H11(xi, 0) t).
FourierField reduced_solve(const RelaxationSystem& system, const BlockDecomposition& decomp,
                           const FourierField& u0, double t);

/// Max over frequencies of the defect in the memory-kernel identity
///   u(t) = e^{H11 t} u0 + G(t) v0 + int_0^t G(t-s) H21 u(s) ds,
/// with u(s) sampled exactly from full_solve at the quadrature nodes.
/// panels >= 16 composite Gauss-Legendre panels.
double mz_residual(const RelaxationSystem& system, const BlockDecomposition& decomp,
                   const FourierField& U0, double t, double eta, int panels);

/// Panel count resolving oscillation at scale eta on [0, t]: 8 eta t / pi
/// quadrature nodes in panels of eight.
int eta_scaled_panels(double eta, double t, int minimum = 16);

struct ConvergenceRecord {
  double epsilon = 0.0;
  double t = 0.0;
  double l2_error = 0.0;
  double low_freq_error = 0.0;   // modes with |xi| <= Xi(eta) = eta / beta_tilde - 1
  double high_freq_error = 0.0;  // remaining modes
  double rate_ratio = 0.0;       // l2_error / (eps |log eps|), natural log
  double h2_norm_u0 = 0.0;
};

/// Slow-variable L^2 error against the reduced solution at eta = 1/epsilon,
/// split at the frequency cutoff Xi(eta) = eta / beta_tilde - 1.
ConvergenceRecord slow_error(const RelaxationSystem& system, const BlockDecomposition& decomp,
                             const FourierField& U0, double t, double epsilon,
                             double beta_tilde = 10.0);

struct ConvergenceStudy {
  std::vector<ConvergenceRecord> records;
  bool errors_strictly_decreasing = false;
  double ratio_max = 0.0;
  double ratio_min = 0.0;
};

/// One record per epsilon (strictly decreasing list in (0, 1)).
ConvergenceStudy convergence_study(const RelaxationSystem& system,
                                   const BlockDecomposition& decomp, const FourierField& U0,
                                   double t, const std::vector<double>& eps_list,
                                   double beta_tilde = 10.0);

}  // namespace relaxlab
