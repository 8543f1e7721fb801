#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relaxlab/linalg.hpp"
#include "relaxlab/relaxation.hpp"

namespace relaxlab {

/// Classification of a single matrix: quasi-stable means sup_t ||e^{Mt}|| is
/// finite, equivalently Re(lambda) <= 0 for all eigenvalues with the
/// imaginary-axis ones semi-simple.
struct StabilityReport {
  bool quasi_stable = false;
  double spectral_abscissa = 0.0;
  // Eigenvalues with |Re| <= tol and geometric < algebraic multiplicity.
  std::vector<Complex> boundary_defects;
  std::optional<double> sup_semigroup;
  bool still_increasing = false;
  std::optional<double> kreiss_estimate;
  bool kreiss_divergent = false;
  bool kreiss_infinite = false;
  double tolerance = 0.0;  // absolute tolerance used for the verdict
};

StabilityReport is_quasi_stable(const ComplexMatrix& M, double rel_tol = kDefaultRelTol);

struct SemigroupSup {
  double value = 1.0;
  double arg_t = 0.0;
  bool still_increasing = false;
};

/// Max of ||e^{Mt}|| over t = 0 and a log-spaced grid on (0, t_max].
/// still_increasing is set when the max sits in the last decile of the grid
/// and M is not quasi-stable.
SemigroupSup sup_semigroup_norm(const ComplexMatrix& M, double t_max, int samples);

/// Sampling grid for the Kreiss measurement: a tensor grid with log-spaced
/// real parts and imaginary parts log-spaced around each eigenvalue's
/// imaginary part, plus shrinking rings around every eigenvalue. Successive
/// refinement levels move the closest approach inward by refine_factor.
struct KreissGrid {
  double re_min = 1e-6;
  double re_max = 1e3;
  int re_points = 40;
  double im_offset_min = 1e-6;
  double im_max = 1e3;
  int im_points = 10;  // per side of each imaginary-part center
  double ring_rho_max = 1e-1;
  double ring_rho_min = 1e-4;
  int ring_radii = 8;
  int ring_angles = 16;
  int refinements = 3;
  double refine_factor = 0.0316227766016838;  // 10^{-1.5}
  double divergence_growth = 10.0;
};

struct KreissEstimate {
  double value = 0.0;  // sampled lower bound of K(M)
  bool divergent = false;
  bool infinite = false;  // sigma(M) lies in the open right half-plane
  std::vector<double> level_values;  // cumulative max after each refinement
};

/// Sampled K(M) = sup_{z in H} ||(zI - M)^{-1}|| / max_{lambda in
/// sigma(M)\H} |z - lambda|^{-1}. Reported as a lower bound; divergence is
/// flagged when some grid refinement grows the estimate by more than
/// divergence_growth (denser approach to the spectrum keeps uncovering
/// growth). Scale-invariant by construction (grid applied to M / ||M||).
KreissEstimate kreiss_measure(const ComplexMatrix& M, const KreissGrid& grid = {},
                              double rel_tol = kDefaultRelTol);

/// The sample points one refinement level of kreiss_measure evaluates,
/// mapped back to the coordinates of M (points with Re z <= 0 included;
/// kreiss_measure skips them when scoring).
std::vector<Complex> kreiss_grid_points(const ComplexMatrix& M, const KreissGrid& grid, int level,
                                        double rel_tol = kDefaultRelTol);

enum class RegionKind { half_plane_H, miller_S, power_T };

struct RegionQuery {
  RegionKind kind = RegionKind::half_plane_H;
  double r = 1.0;  // region parameter; unused for half_plane_H
  std::vector<Complex> sample_points;
};

struct ResolventRatioCheck {
  double max_ratio = 0.0;
  Complex arg_z{0.0, 0.0};
  double K = 0.0;
  bool holds = false;  // max_ratio <= K
};

/// Max over samples z in H of ||(zI - M)^{-1}|| / max_lambda |z - lambda|^{-1}.
ResolventRatioCheck check_improved_resolvent(const ComplexMatrix& M, double K,
                                             const RegionQuery& query,
                                             double rel_tol = kDefaultRelTol);

/// Max over samples of ||(zI - M)^{-1}|| / [(1 + 1/r)^{n-1} max_lambda
/// |z - lambda|^{-1}] for samples in S(M, r) (miller_S) or T(M, r) (power_T).
/// Samples violating region membership raise PreconditionError naming the point.
ResolventRatioCheck region_resolvent_check(const ComplexMatrix& M, double K,
                                           const RegionQuery& query,
                                           double rel_tol = kDefaultRelTol);

/// Points on the boundary circles |z - lambda| = r * weight(lambda) that
/// satisfy the region membership predicate for all eigenvalues.
std::vector<Complex> region_boundary_samples(const ComplexMatrix& M, RegionKind kind, double r,
                                             int angles_per_eigenvalue,
                                             double rel_tol = kDefaultRelTol);

struct PowerBoundReport {
  bool power_bounded = false;
  double spectral_radius = 0.0;
  std::vector<Complex> boundary_defects;  // |lambda| ~ 1 with geometric < algebraic
  double sup_norm = 1.0;                  // max ||M^nu|| over sampled doubling powers
  std::uint64_t max_power = 0;
  std::uint64_t overflow_power = 0;  // 0 when no overflow occurred
  double tolerance = 0.0;
};

/// Verdict via the spectral characterization (|lambda| <= 1 + tol, unit-circle
/// eigenvalues semi-simple); sup over powers nu = 1, 2, 4, ..., 2^20 by
/// repeated squaring is reported alongside.
PowerBoundReport is_power_bounded(const ComplexMatrix& M, double rel_tol = kDefaultRelTol);

struct TriangularInverseBound {
  double inv_norm = 0.0;
  double bound = 0.0;
  bool holds = false;
};

/// For unit upper triangular A: (||A^{-1}||, (n ||A||)^{n-1}).
TriangularInverseBound unit_triangular_inverse_check(const ComplexMatrix& A);

struct YongConditionResult {
  bool passed = false;
  double margin = 0.0;
  std::string detail;
};

/// Certificate report for Yong's stability conditions, checked in the
/// transformed coordinates of the block decomposition (A0 is the symmetrizer
/// for the transformed system; in that frame Q' = diag(0, B) and the strong
/// coupling bound reads A0 Q' + Q'* A0 <= -diag(0, I_r)).
struct YongReport {
  YongConditionResult fast_spectrum;  // (i)   Re(lambda(B)) < 0
  YongConditionResult symmetrizer;    // (ii)  A0 > 0 Hermitian, A0 A'_j = A'_j* A0
  YongConditionResult coupling;       // (iii) A0 Q' + Q'* A0 <= 0 (or strong form)
  bool strong = false;

  bool all_passed() const { return fast_spectrum.passed && symmetrizer.passed && coupling.passed; }
};

YongReport yong_check(const RelaxationSystem& system, const ComplexMatrix& A0, bool strong,
                      double rel_tol = 1e-10);

}  // namespace relaxlab
