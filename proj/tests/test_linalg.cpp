#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "relaxlab/linalg.hpp"
#include "test_util.hpp"

using namespace relaxlab;
using testutil::uniform;

namespace {

ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  ComplexMatrix M(2, 2);
  M << a, b, c, d;
  return M;
}

const EigenvalueCluster* find_cluster(const Spectrum& spec, Complex value, double tol = 1e-7) {
  for (const auto& c : spec.clusters) {
    if (std::abs(c.value - value) <= tol) return &c;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("spectrum: diagonal matrix with a repeated eigenvalue") {
  ComplexMatrix M = ComplexMatrix::Zero(3, 3);
  M(0, 0) = -1.0;
  M(1, 1) = -1.0;
  M(2, 2) = Complex(0.0, 3.0);

  const Spectrum spec = spectrum(M);
  REQUIRE(spec.clusters.size() == 2);
  const auto* minus_one = find_cluster(spec, Complex(-1.0, 0.0));
  const auto* three_i = find_cluster(spec, Complex(0.0, 3.0));
  REQUIRE(minus_one != nullptr);
  REQUIRE(three_i != nullptr);
  CHECK(minus_one->algebraic == 2);
  CHECK(minus_one->geometric == 2);
  CHECK(three_i->algebraic == 1);
  CHECK(three_i->geometric == 1);
}

TEST_CASE("spectrum: nilpotent Jordan block is defective") {
  const ComplexMatrix M = mat2(0, 1, 0, 0);
  const Spectrum spec = spectrum(M);
  REQUIRE(spec.clusters.size() == 1);
  CHECK(spec.clusters[0].algebraic == 2);
  CHECK(spec.clusters[0].geometric == 1);
  CHECK(std::abs(spec.clusters[0].value) < 1e-8);
}

TEST_CASE("spectrum: recovers the diagonal of a known factorization") {
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Complex> values;
    for (int i = 0; i < 5; ++i) {
      values.push_back(testutil::random_complex(g, 2.0) + Complex(0.0, 0.7 * i));
    }
    // keep the eigenvalues separated so the clustering is unambiguous
    bool separated = true;
    for (std::size_t a = 0; a < values.size(); ++a) {
      for (std::size_t b = a + 1; b < values.size(); ++b) {
        if (std::abs(values[a] - values[b]) < 0.2) separated = false;
      }
    }
    if (!separated) continue;

    const ComplexMatrix M = testutil::with_eigenvalues(g, values);
    const Spectrum spec = spectrum(M);
    REQUIRE(spec.clusters.size() == values.size());
    for (const auto& v : values) {
      const auto* c = find_cluster(spec, v, 1e-8);
      REQUIRE_MESSAGE(c != nullptr, "missing eigenvalue");
      CHECK(c->algebraic == 1);
    }
  }
}

TEST_CASE("spectrum: invariant under well-conditioned similarity") {
  std::mt19937_64 g(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(uniform(g, 0.0, 4.99));
    const ComplexMatrix M = testutil::random_matrix(g, n);
    const ComplexMatrix V = testutil::random_well_conditioned(g, n);
    const Spectrum a = spectrum(M);
    const Spectrum b = spectrum(V * M * V.inverse());
    for (const auto& c : a.clusters) {
      double best = 1e300;
      for (const auto& d : b.clusters) best = std::min(best, std::abs(c.value - d.value));
      CHECK(best <= 1e-6 * std::max(1.0, operator_norm(M)));
    }
  }
}

TEST_CASE("spectrum: rejects non-square input") {
  ComplexMatrix M(2, 3);
  M.setZero();
  CHECK_THROWS_AS(spectrum(M), InvalidArgumentError);
}

TEST_CASE("mat_exp: zero matrix gives the identity") {
  const ComplexMatrix E = mat_exp(ComplexMatrix::Zero(4, 4), 3.7);
  CHECK(operator_norm(E - ComplexMatrix::Identity(4, 4)) < 1e-14);
}

TEST_CASE("mat_exp: rotation generator") {
  const ComplexMatrix M = mat2(0, 1, -1, 0);
  for (double t : {0.0, 0.3, 2.0, -5.0, 40.0}) {
    const ComplexMatrix expected =
        mat2(std::cos(t), std::sin(t), -std::sin(t), std::cos(t));
    CHECK(operator_norm(mat_exp(M, t) - expected) < 1e-13);
  }
}

TEST_CASE("mat_exp: nilpotent series truncates") {
  const ComplexMatrix M = mat2(0, 1, 0, 0);
  for (double t : {0.5, 7.0}) {
    const ComplexMatrix expected = mat2(1, t, 0, 1);
    CHECK(operator_norm(mat_exp(M, t) - expected) < 1e-13 * (1.0 + std::abs(t)));
  }
}

TEST_CASE("mat_exp: semigroup property on random matrices") {
  std::mt19937_64 g(13);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(uniform(g, 0.0, 6.99));
    const ComplexMatrix M = testutil::random_matrix(g, n);
    const double s = uniform(g, 0.0, 10.0);
    const double t = uniform(g, 0.0, 10.0);
    const ComplexMatrix Es = mat_exp(M, s);
    const ComplexMatrix Et = mat_exp(M, t);
    const double defect = operator_norm(mat_exp(M, s + t) - Es * Et);
    CHECK(defect <= 1e-9 * (1.0 + operator_norm(Es) * operator_norm(Et)));
  }
}

TEST_CASE("mat_exp: overflow is an explicit error") {
  ComplexMatrix M = ComplexMatrix::Zero(2, 2);
  M(0, 0) = 1000.0;
  M(1, 1) = -1.0;
  CHECK_THROWS_AS(mat_exp(M, 1.0), OverflowError);
}

TEST_CASE("resolvent: scalar case") {
  ComplexMatrix M(1, 1);
  M(0, 0) = -1.0;
  const ComplexMatrix R = resolvent(M, Complex(1.0, 0.0));
  CHECK(std::abs(R(0, 0) - Complex(0.5, 0.0)) < 1e-14);
}

TEST_CASE("resolvent: Jordan block matches the finite Neumann sum") {
  // (zI - J)^{-1} = sum_{j<k} (z - lambda)^{-(j+1)} N^j for a k x k block.
  const int k = 3;
  const Complex lambda(-1.0, 0.0);
  ComplexMatrix J = lambda * ComplexMatrix::Identity(k, k);
  ComplexMatrix N = ComplexMatrix::Zero(k, k);
  for (int i = 0; i + 1 < k; ++i) N(i, i + 1) = 1.0;
  J += N;

  const Complex z(0.0, 0.0);
  ComplexMatrix expected = ComplexMatrix::Zero(k, k);
  ComplexMatrix Npow = ComplexMatrix::Identity(k, k);
  for (int j = 0; j < k; ++j) {
    expected += std::pow(z - lambda, -(j + 1)) * Npow;
    Npow = (Npow * N).eval();
  }
  CHECK(operator_norm(resolvent(J, z) - expected) <= 1e-10 * operator_norm(expected));
}

TEST_CASE("resolvent: z at an eigenvalue names the singularity") {
  ComplexMatrix M = ComplexMatrix::Zero(2, 2);
  M(0, 0) = -1.0;
  M(1, 1) = Complex(0.0, 2.0);
  try {
    resolvent(M, Complex(0.0, 2.0));
    FAIL("expected SingularityError");
  } catch (const SingularityError& e) {
    CHECK(std::abs(e.eigenvalue() - Complex(0.0, 2.0)) < 1e-8);
  }
}

TEST_CASE("resolvent: first resolvent identity") {
  std::mt19937_64 g(14);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(uniform(g, 0.0, 4.99));
    const ComplexMatrix M = testutil::random_matrix(g, n);
    const Complex z1(uniform(g, 2.5, 4.0), uniform(g, -2.0, 2.0));
    const Complex z2(uniform(g, 2.5, 4.0), uniform(g, 2.5, 4.0));
    const ComplexMatrix R1 = resolvent(M, z1);
    const ComplexMatrix R2 = resolvent(M, z2);
    const ComplexMatrix lhs = R1 - R2;
    const ComplexMatrix rhs = (z2 - z1) * R1 * R2;
    CHECK(operator_norm(lhs - rhs) <= 1e-9 * (operator_norm(lhs) + operator_norm(rhs) + 1e-30));
  }
}

TEST_CASE("operator_norm: identity and rank-one") {
  CHECK(operator_norm(ComplexMatrix::Identity(5, 5)) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(operator_norm(mat2(0, 3, 0, 0)) == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("operator_norm: closed form for [[1,c],[0,1]]") {
  // ||[[1,c],[0,1]]|| = (|c| + sqrt(c^2 + 4)) / 2
  const double c = 10.0;
  const double expected = (c + std::sqrt(c * c + 4.0)) / 2.0;
  CHECK(operator_norm(mat2(1, c, 0, 1)) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("resolvent norm of a normal matrix is the inverse spectral distance") {
  std::mt19937_64 g(15);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(uniform(g, 0.0, 4.99));
    const ComplexMatrix M = testutil::random_normal_quasi_stable(g, n);
    const Spectrum spec = spectrum(M);
    const Complex z(uniform(g, 0.5, 3.0), uniform(g, -3.0, 3.0));
    const double direct = operator_norm(resolvent(M, z));
    const double via_distance = 1.0 / spec.distance_to(z);
    CHECK(direct == doctest::Approx(via_distance).epsilon(1e-9));
  }
}
