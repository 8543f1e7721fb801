#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "relaxlab/errors.hpp"

namespace relaxlab {

// Dense complex matrices at small fixed sizes are the working currency of the
// whole library. All norms are spectral (largest singular value); the choice
// matters for every constant reported downstream and is recorded in outputs.
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Largest matrix dimension accepted by the dense kernels.
inline constexpr int kMaxDim = 64;

/// Default relative tolerance for eigenvalue clustering and rank decisions.
inline constexpr double kDefaultRelTol = 1e-8;

/// One cluster of numerically coincident eigenvalues.
struct EigenvalueCluster {
  Complex value;
  int algebraic = 0;
  int geometric = 0;
};

/// Spectrum of a matrix with multiplicities resolved at a stated tolerance.
struct Spectrum {
  std::vector<EigenvalueCluster> clusters;
  double clustering_tol = 0.0;  // absolute merge distance actually used
  int dim = 0;

  /// max of Re(lambda) over all clusters.
  double spectral_abscissa() const;
  /// min of |lambda| over all clusters.
  double min_abs() const;
  /// Distance from z to the nearest cluster value.
  double distance_to(Complex z) const;
  /// Cluster value nearest to z.
  Complex nearest(Complex z) const;
  bool semi_simple(const EigenvalueCluster& c) const { return c.geometric == c.algebraic; }
};

void ensure_square(const ComplexMatrix& M, const char* who);
void ensure_finite(const ComplexMatrix& M, const char* who);

/// Eigenvalues of a square matrix, merged into clusters of mutual distance
/// <= rel_tol * ||M||. Geometric multiplicity of a cluster is n minus the
/// numerical rank of (M - lambda I) with singular-value cutoff rel_tol * ||M||.
Spectrum spectrum(const ComplexMatrix& M, double rel_tol = kDefaultRelTol);

/// e^{M t} by scaling-and-squaring with a diagonal rational approximant.
/// Throws OverflowError when the result cannot be represented (the spectral
/// radius e^{max Re(lambda) t} already exceeds the double range, or an
/// intermediate squaring overflowed).
ComplexMatrix mat_exp(const ComplexMatrix& M, double t = 1.0);

/// (zI - M)^{-1}. Throws SingularityError naming the offending eigenvalue
/// when z is within rel_tol * ||M|| of the spectrum.
ComplexMatrix resolvent(const ComplexMatrix& M, Complex z, double rel_tol = kDefaultRelTol);

/// Spectral norm (largest singular value).
double operator_norm(const ComplexMatrix& M);

/// ||(zI - M)^{-1}|| without forming the inverse: 1 / sigma_min(zI - M).
double resolvent_norm(const ComplexMatrix& M, Complex z);

}  // namespace relaxlab
