#include "relaxlab/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace relaxlab {

namespace {

// log(DBL_MAX), the spectral-abscissa overflow threshold for e^{Mt}.
constexpr double kLogDoubleMax = 709.782712893384;

std::string dim_string(const ComplexMatrix& M) {
  std::ostringstream os;
  os << M.rows() << "x" << M.cols();
  return os.str();
}

}  // namespace

void ensure_square(const ComplexMatrix& M, const char* who) {
  if (M.rows() != M.cols()) {
    throw InvalidArgumentError(std::string(who) + ": matrix must be square, got " + dim_string(M));
  }
  if (M.rows() == 0) {
    throw InvalidArgumentError(std::string(who) + ": matrix must be non-empty");
  }
  if (M.rows() > kMaxDim) {
    throw InvalidArgumentError(std::string(who) + ": dimension " + std::to_string(M.rows()) +
                               " exceeds the supported maximum " + std::to_string(kMaxDim));
  }
}

void ensure_finite(const ComplexMatrix& M, const char* who) {
  if (!M.allFinite()) {
    throw InvalidArgumentError(std::string(who) + ": matrix has NaN/Inf entries");
  }
}

double Spectrum::spectral_abscissa() const {
  double a = -std::numeric_limits<double>::infinity();
  for (const auto& c : clusters) a = std::max(a, c.value.real());
  return a;
}

double Spectrum::min_abs() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : clusters) m = std::min(m, std::abs(c.value));
  return m;
}

double Spectrum::distance_to(Complex z) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& c : clusters) d = std::min(d, std::abs(z - c.value));
  return d;
}

Complex Spectrum::nearest(Complex z) const {
  double d = std::numeric_limits<double>::infinity();
  Complex best{0.0, 0.0};
  for (const auto& c : clusters) {
    const double dc = std::abs(z - c.value);
    if (dc < d) {
      d = dc;
      best = c.value;
    }
  }
  return best;
}

Spectrum spectrum(const ComplexMatrix& M, double rel_tol) {
  ensure_square(M, "spectrum");
  ensure_finite(M, "spectrum");
  if (!(rel_tol > 0.0)) throw InvalidArgumentError("spectrum: tolerance must be > 0");

  const int n = static_cast<int>(M.rows());
  const double scale = operator_norm(M);
  const double tol_abs = rel_tol * scale;

  Eigen::ComplexEigenSolver<ComplexMatrix> solver(M, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw EigensolverError("spectrum: complex eigensolver did not converge");
  }
  const ComplexVector values = solver.eigenvalues();

  // Single-linkage merge: any two values within tol_abs end in the same cluster.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&parent](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(values[i] - values[j]) <= tol_abs) parent[find(i)] = find(j);
    }
  }

  Spectrum result;
  result.clustering_tol = tol_abs;
  result.dim = n;
  std::vector<int> roots;
  for (int i = 0; i < n; ++i) {
    if (find(i) == i) roots.push_back(i);
  }
  for (int root : roots) {
    Complex sum{0.0, 0.0};
    int count = 0;
    for (int i = 0; i < n; ++i) {
      if (find(i) == root) {
        sum += values[i];
        ++count;
      }
    }
    EigenvalueCluster cluster;
    cluster.value = sum / static_cast<double>(count);
    cluster.algebraic = count;

    // geometric multiplicity = n - numerical rank of (M - lambda I)
    ComplexMatrix shifted = M;
    shifted.diagonal().array() -= cluster.value;
    Eigen::JacobiSVD<ComplexMatrix> svd(shifted);
    int rank = 0;
    for (int k = 0; k < n; ++k) {
      if (svd.singularValues()[k] > tol_abs) ++rank;
    }
    cluster.geometric = std::clamp(n - rank, 1, cluster.algebraic);
    result.clusters.push_back(cluster);
  }

  std::sort(result.clusters.begin(), result.clusters.end(),
            [](const EigenvalueCluster& a, const EigenvalueCluster& b) {
              if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
              return a.value.imag() < b.value.imag();
            });
  return result;
}

ComplexMatrix mat_exp(const ComplexMatrix& M, double t) {
  ensure_square(M, "mat_exp");
  ensure_finite(M, "mat_exp");
  if (!std::isfinite(t)) throw InvalidArgumentError("mat_exp: t must be finite");

  const ComplexMatrix scaled = M * t;

  // A huge scaled norm is either certain overflow or a very long squaring
  // chain; decide from the spectral abscissa before burning the work.
  if (scaled.cwiseAbs().maxCoeff() > 1e6) {
    const Spectrum spec = spectrum(M);
    const double growth = spec.spectral_abscissa() * t;
    if (growth > kLogDoubleMax) {
      std::ostringstream os;
      os << "mat_exp: overflow, max Re(lambda)*t = " << growth << " exceeds log(DBL_MAX)";
      throw OverflowError(os.str());
    }
  }

  ComplexMatrix result = scaled.exp();
  if (!result.allFinite()) {
    throw OverflowError("mat_exp: overflow during scaling-and-squaring");
  }
  return result;
}

ComplexMatrix resolvent(const ComplexMatrix& M, Complex z, double rel_tol) {
  ensure_square(M, "resolvent");
  ensure_finite(M, "resolvent");

  const Spectrum spec = spectrum(M, rel_tol);
  const Complex nearest = spec.nearest(z);
  const double dist = std::abs(z - nearest);
  if (dist <= spec.clustering_tol) {
    std::ostringstream os;
    os << "resolvent: z = (" << z.real() << ", " << z.imag() << ") is within tolerance "
       << spec.clustering_tol << " of eigenvalue (" << nearest.real() << ", " << nearest.imag()
       << ")";
    throw SingularityError(os.str(), nearest);
  }

  const int n = static_cast<int>(M.rows());
  ComplexMatrix shifted = -M;
  shifted.diagonal().array() += z;
  return shifted.partialPivLu().solve(ComplexMatrix::Identity(n, n));
}

double operator_norm(const ComplexMatrix& M) {
  if (M.size() == 0) return 0.0;
  if (!M.allFinite()) return std::numeric_limits<double>::infinity();
  if (M.rows() == 1 && M.cols() == 1) return std::abs(M(0, 0));
  Eigen::JacobiSVD<ComplexMatrix> svd(M);
  return svd.singularValues()[0];
}

double resolvent_norm(const ComplexMatrix& M, Complex z) {
  ComplexMatrix shifted = -M;
  shifted.diagonal().array() += z;
  Eigen::JacobiSVD<ComplexMatrix> svd(shifted);
  const double sigma_min = svd.singularValues()[shifted.rows() - 1];
  if (sigma_min == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / sigma_min;
}

}  // namespace relaxlab
