#include "relaxlab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace relaxlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> log_space(double lo, double hi, int count) {
  std::vector<double> out;
  if (count <= 0 || !(lo > 0.0) || !(hi >= lo)) return out;
  out.reserve(count);
  if (count == 1) {
    out.push_back(hi);
    return out;
  }
  const double ratio = hi / lo;
  for (int i = 0; i < count; ++i) {
    out.push_back(lo * std::pow(ratio, static_cast<double>(i) / (count - 1)));
  }
  return out;
}

std::string complex_string(Complex z) {
  std::ostringstream os;
  os << "(" << z.real() << ", " << z.imag() << ")";
  return os.str();
}

// Distance from z to the sub-spectrum selected by `pick`.
template <typename Pick>
double distance_to_selected(const Spectrum& spec, Complex z, Pick pick) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& c : spec.clusters) {
    if (pick(c)) d = std::min(d, std::abs(z - c.value));
  }
  return d;
}

double region_weight(RegionKind kind, Complex lambda) {
  switch (kind) {
    case RegionKind::miller_S:
      return std::abs(lambda.real());
    case RegionKind::power_T:
      return std::max(1.0 - std::abs(lambda), 0.0);
    default:
      return 0.0;
  }
}

bool region_member(const Spectrum& spec, RegionKind kind, double r, Complex z) {
  if (kind == RegionKind::half_plane_H) return z.real() > 0.0;
  for (const auto& c : spec.clusters) {
    const double w = region_weight(kind, c.value);
    // membership: r * weight(lambda) <= |z - lambda| for every eigenvalue
    if (r * w > std::abs(z - c.value) * (1.0 + 1e-9) + 1e-300) return false;
  }
  return true;
}

}  // namespace

StabilityReport is_quasi_stable(const ComplexMatrix& M, double rel_tol) {
  const Spectrum spec = spectrum(M, rel_tol);
  StabilityReport report;
  report.tolerance = spec.clustering_tol;
  report.spectral_abscissa = spec.spectral_abscissa();

  bool ok = report.spectral_abscissa <= spec.clustering_tol;
  for (const auto& c : spec.clusters) {
    if (std::abs(c.value.real()) <= spec.clustering_tol && c.geometric < c.algebraic) {
      report.boundary_defects.push_back(c.value);
      ok = false;
    }
  }
  report.quasi_stable = ok;
  return report;
}

SemigroupSup sup_semigroup_norm(const ComplexMatrix& M, double t_max, int samples) {
  ensure_square(M, "sup_semigroup_norm");
  if (!(t_max > 0.0)) throw InvalidArgumentError("sup_semigroup_norm: t_max must be > 0");
  if (samples < 2) throw InvalidArgumentError("sup_semigroup_norm: samples must be >= 2");

  SemigroupSup result;
  result.value = 1.0;  // ||e^{M 0}|| = ||I||
  result.arg_t = 0.0;

  const std::vector<double> grid = log_space(t_max * 1e-6, t_max, samples - 1);
  int arg_index = -1;
  for (int i = 0; i < static_cast<int>(grid.size()); ++i) {
    const double norm = operator_norm(mat_exp(M, grid[i]));
    if (norm > result.value) {
      result.value = norm;
      result.arg_t = grid[i];
      arg_index = i;
    }
  }

  const int n_grid = static_cast<int>(grid.size());
  const int decile_start = n_grid - std::max(1, n_grid / 10);
  if (arg_index >= decile_start && !is_quasi_stable(M).quasi_stable) {
    result.still_increasing = true;
  }
  return result;
}

std::vector<Complex> kreiss_grid_points(const ComplexMatrix& M, const KreissGrid& grid, int level,
                                        double rel_tol) {
  ensure_square(M, "kreiss_grid_points");
  ensure_finite(M, "kreiss_grid_points");
  const double scale = operator_norm(M);
  const ComplexMatrix Mn = (scale > 0.0) ? ComplexMatrix(M / scale) : M;
  const Spectrum spec = spectrum(Mn, rel_tol);

  const double shrink = std::pow(grid.refine_factor, level);
  std::vector<Complex> points;

  // Tensor part: log-spaced real parts, imaginary parts clustered around the
  // imaginary part of each eigenvalue (and around zero).
  std::vector<double> im_centers{0.0};
  for (const auto& c : spec.clusters) im_centers.push_back(c.value.imag());
  const std::vector<double> re_values = log_space(grid.re_min * shrink, grid.re_max, grid.re_points);
  const std::vector<double> im_offsets = log_space(grid.im_offset_min, grid.im_max, grid.im_points);
  for (double re : re_values) {
    for (double center : im_centers) {
      points.emplace_back(re, center);
      for (double off : im_offsets) {
        points.emplace_back(re, center + off);
        points.emplace_back(re, center - off);
      }
    }
  }

  // Ring part: shrinking circles around every eigenvalue, clipped to H.
  const std::vector<double> radii =
      log_space(grid.ring_rho_min * shrink, grid.ring_rho_max, grid.ring_radii);
  for (const auto& c : spec.clusters) {
    for (double rho : radii) {
      for (int k = 0; k < grid.ring_angles; ++k) {
        const double phi = 2.0 * kPi * k / grid.ring_angles;
        const Complex z = c.value + rho * Complex(std::cos(phi), std::sin(phi));
        if (z.real() > 0.0) points.push_back(z);
      }
    }
  }

  // Map back from the normalized matrix to M itself.
  if (scale > 0.0 && scale != 1.0) {
    for (auto& z : points) z *= scale;
  }
  return points;
}

KreissEstimate kreiss_measure(const ComplexMatrix& M, const KreissGrid& grid, double rel_tol) {
  ensure_square(M, "kreiss_measure");
  ensure_finite(M, "kreiss_measure");

  const double scale = operator_norm(M);
  const ComplexMatrix Mn = (scale > 0.0) ? ComplexMatrix(M / scale) : M;
  const Spectrum spec = spectrum(Mn, rel_tol);
  const double tol = spec.clustering_tol;

  KreissEstimate estimate;
  const auto in_left = [tol](const EigenvalueCluster& c) { return c.value.real() <= tol; };
  if (std::none_of(spec.clusters.begin(), spec.clusters.end(), in_left)) {
    // sigma(M) in the open right half-plane: K(M) := +infinity by convention.
    estimate.infinite = true;
    estimate.value = std::numeric_limits<double>::infinity();
    return estimate;
  }

  double running = 0.0;
  for (int level = 0; level < grid.refinements; ++level) {
    const std::vector<Complex> points = kreiss_grid_points(M, grid, level, rel_tol);
    for (Complex z_raw : points) {
      const Complex z = (scale > 0.0) ? z_raw / scale : z_raw;
      if (!(z.real() > 0.0)) continue;
      const double dist_left = distance_to_selected(spec, z, in_left);
      if (spec.distance_to(z) < 1e-13) continue;  // numerically at an eigenvalue
      const double ratio = resolvent_norm(Mn, z) * dist_left;
      if (std::isfinite(ratio) && ratio > running) running = ratio;
    }
    estimate.level_values.push_back(running);
  }
  estimate.value = running;

  // Divergent when a refinement step multiplies the estimate: closer approach
  // to the spectrum keeps uncovering growth. For finite K the levels settle
  // because level 0 already reaches standoff distance ring_rho_min.
  for (std::size_t i = 0; i + 1 < estimate.level_values.size(); ++i) {
    if (estimate.level_values[i + 1] > grid.divergence_growth * estimate.level_values[i]) {
      estimate.divergent = true;
      break;
    }
  }
  return estimate;
}

ResolventRatioCheck check_improved_resolvent(const ComplexMatrix& M, double K,
                                             const RegionQuery& query, double rel_tol) {
  if (query.kind != RegionKind::half_plane_H) {
    throw InvalidArgumentError("check_improved_resolvent: query kind must be half_plane_H");
  }
  const Spectrum spec = spectrum(M, rel_tol);

  ResolventRatioCheck check;
  check.K = K;
  for (Complex z : query.sample_points) {
    if (!(z.real() > 0.0)) {
      throw PreconditionError("check_improved_resolvent: sample " + complex_string(z) +
                              " is not in the open right half-plane");
    }
    const double ratio = resolvent_norm(M, z) * spec.distance_to(z);
    if (ratio > check.max_ratio) {
      check.max_ratio = ratio;
      check.arg_z = z;
    }
  }
  check.holds = check.max_ratio <= K;
  return check;
}

ResolventRatioCheck region_resolvent_check(const ComplexMatrix& M, double K,
                                           const RegionQuery& query, double rel_tol) {
  if (query.kind == RegionKind::half_plane_H) {
    throw InvalidArgumentError("region_resolvent_check: query kind must be miller_S or power_T");
  }
  if (!(query.r > 0.0)) throw InvalidArgumentError("region_resolvent_check: r must be > 0");

  if (query.kind == RegionKind::miller_S) {
    if (!is_quasi_stable(M, rel_tol).quasi_stable) {
      throw PreconditionError("region_resolvent_check: matrix is not quasi-stable");
    }
  } else {
    if (!is_power_bounded(M, rel_tol).power_bounded) {
      throw PreconditionError("region_resolvent_check: matrix is not power-bounded");
    }
  }

  const Spectrum spec = spectrum(M, rel_tol);
  const int n = static_cast<int>(M.rows());
  const double inflation = std::pow(1.0 + 1.0 / query.r, n - 1);

  ResolventRatioCheck check;
  check.K = K;
  for (Complex z : query.sample_points) {
    if (!region_member(spec, query.kind, query.r, z)) {
      throw PreconditionError("region_resolvent_check: sample " + complex_string(z) +
                              " violates the region membership predicate");
    }
    const double ratio = resolvent_norm(M, z) * spec.distance_to(z) / inflation;
    if (ratio > check.max_ratio) {
      check.max_ratio = ratio;
      check.arg_z = z;
    }
  }
  check.holds = check.max_ratio <= K;
  return check;
}

std::vector<Complex> region_boundary_samples(const ComplexMatrix& M, RegionKind kind, double r,
                                             int angles_per_eigenvalue, double rel_tol) {
  if (kind == RegionKind::half_plane_H) {
    throw InvalidArgumentError("region_boundary_samples: no boundary circles for half_plane_H");
  }
  const Spectrum spec = spectrum(M, rel_tol);

  std::vector<Complex> samples;
  for (const auto& c : spec.clusters) {
    const double w = region_weight(kind, c.value);
    if (w <= spec.clustering_tol) continue;  // degenerate circle
    const double rho = r * w * (1.0 + 1e-9);
    for (int k = 0; k < angles_per_eigenvalue; ++k) {
      const double phi = 2.0 * kPi * k / angles_per_eigenvalue;
      const Complex z = c.value + rho * Complex(std::cos(phi), std::sin(phi));
      if (!region_member(spec, kind, r, z)) continue;  // interior of another disk
      if (spec.distance_to(z) <= spec.clustering_tol) continue;
      samples.push_back(z);
    }
  }
  return samples;
}

PowerBoundReport is_power_bounded(const ComplexMatrix& M, double rel_tol) {
  const Spectrum spec = spectrum(M, rel_tol);
  const double tol = rel_tol * std::max(operator_norm(M), 1.0);

  PowerBoundReport report;
  report.tolerance = tol;
  for (const auto& c : spec.clusters) {
    report.spectral_radius = std::max(report.spectral_radius, std::abs(c.value));
    if (std::abs(std::abs(c.value) - 1.0) <= tol && c.geometric < c.algebraic) {
      report.boundary_defects.push_back(c.value);
    }
  }
  bool verdict = report.spectral_radius <= 1.0 + tol && report.boundary_defects.empty();

  // ||M^nu|| over doubling powers by repeated squaring; nu = 0 contributes 1.
  report.sup_norm = 1.0;
  report.max_power = 1;
  ComplexMatrix X = M;
  report.sup_norm = std::max(report.sup_norm, operator_norm(X));
  for (int step = 1; step <= 20; ++step) {
    X = (X * X).eval();
    const std::uint64_t nu = std::uint64_t{1} << step;
    const double norm = operator_norm(X);
    if (!X.allFinite() || norm > 1e150) {
      report.overflow_power = nu;
      verdict = false;
      break;
    }
    report.sup_norm = std::max(report.sup_norm, norm);
    report.max_power = nu;
  }
  report.power_bounded = verdict;
  return report;
}

TriangularInverseBound unit_triangular_inverse_check(const ComplexMatrix& A) {
  ensure_square(A, "unit_triangular_inverse_check");
  ensure_finite(A, "unit_triangular_inverse_check");
  const int n = static_cast<int>(A.rows());
  for (int i = 0; i < n; ++i) {
    if (A(i, i) != Complex(1.0, 0.0)) {
      throw InvalidArgumentError("unit_triangular_inverse_check: diagonal entry (" +
                                 std::to_string(i) + ") is not exactly 1");
    }
    for (int j = 0; j < i; ++j) {
      if (A(i, j) != Complex(0.0, 0.0)) {
        throw InvalidArgumentError("unit_triangular_inverse_check: entry below the diagonal at (" +
                                   std::to_string(i) + "," + std::to_string(j) + ") is nonzero");
      }
    }
  }

  const ComplexMatrix inv =
      A.triangularView<Eigen::Upper>().solve(ComplexMatrix::Identity(n, n));
  TriangularInverseBound result;
  result.inv_norm = operator_norm(inv);
  result.bound = std::pow(n * operator_norm(A), n - 1);
  result.holds = result.inv_norm <= result.bound * (1.0 + 1e-12);
  return result;
}

YongReport yong_check(const RelaxationSystem& system, const ComplexMatrix& A0, bool strong,
                      double rel_tol) {
  system.validate();
  ensure_square(A0, "yong_check");
  ensure_finite(A0, "yong_check");
  if (A0.rows() != system.n) {
    throw InvalidArgumentError("yong_check: A0 must be " + std::to_string(system.n) + "x" +
                               std::to_string(system.n));
  }
  const double a0_norm = operator_norm(A0);
  if (operator_norm(A0 - A0.adjoint()) > 1e-12 * std::max(a0_norm, 1.0)) {
    throw InvalidArgumentError("yong_check: A0 must be Hermitian");
  }

  const BlockDecomposition decomp = block_decompose(system);
  YongReport report;
  report.strong = strong;

  // (i) every eigenvalue of B has negative real part.
  {
    std::ostringstream detail;
    if (decomp.r == 0) {
      report.fast_spectrum.passed = true;
      report.fast_spectrum.margin = std::numeric_limits<double>::infinity();
      detail << "B is empty (Q = 0)";
    } else {
      const Spectrum spec_B = spectrum(decomp.B);
      const double abscissa = spec_B.spectral_abscissa();
      report.fast_spectrum.margin = -abscissa;
      report.fast_spectrum.passed = abscissa < -spec_B.clustering_tol;
      detail << "max Re(lambda(B)) = " << abscissa;
    }
    report.fast_spectrum.detail = detail.str();
  }

  // (ii) A0 positive definite and A0 A'_j Hermitian for every j.
  {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(((A0 + A0.adjoint()) / 2.0).eval());
    const double min_eig = es.eigenvalues().minCoeff();
    double worst_commutator = 0.0;
    for (const auto& Aj : decomp.transformed_A) {
      worst_commutator =
          std::max(worst_commutator, operator_norm(A0 * Aj - Aj.adjoint() * A0));
    }
    double commutator_scale = a0_norm;
    for (const auto& Aj : decomp.transformed_A) {
      commutator_scale = std::max(commutator_scale, a0_norm * operator_norm(Aj));
    }
    const double tol = rel_tol * std::max(commutator_scale, 1.0);
    report.symmetrizer.margin = min_eig;
    report.symmetrizer.passed = min_eig > tol && worst_commutator <= tol;
    std::ostringstream detail;
    detail << "min eig(A0) = " << min_eig << ", worst ||A0 A'_j - A'_j* A0|| = " << worst_commutator;
    report.symmetrizer.detail = detail.str();
  }

  // (iii) A0 Q' + Q'* A0 <= 0, strengthened by -diag(0, I_r) for the strong form.
  {
    ComplexMatrix S = A0 * decomp.transformed_Q + decomp.transformed_Q.adjoint() * A0;
    if (strong) {
      for (int i = system.n - decomp.r; i < system.n; ++i) S(i, i) += Complex(1.0, 0.0);
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(((S + S.adjoint()) / 2.0).eval());
    const double max_eig = es.eigenvalues().maxCoeff();
    const double scale = std::max({a0_norm * operator_norm(decomp.transformed_Q), 1.0});
    report.coupling.margin = -max_eig;
    report.coupling.passed = max_eig <= rel_tol * scale;
    std::ostringstream detail;
    detail << "max eig(A0 Q' + Q'* A0" << (strong ? " + diag(0, I_r)" : "") << ") = " << max_eig;
    report.coupling.detail = detail.str();
  }

  return report;
}

}  // namespace relaxlab
