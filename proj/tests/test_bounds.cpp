#include <doctest.h>

#include <cmath>

#include "relaxlab/bounds.hpp"
#include "relaxlab/spectral.hpp"
#include "test_util.hpp"

using namespace relaxlab;
using testutil::uniform;

namespace {

ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  ComplexMatrix M(2, 2);
  M << a, b, c, d;
  return M;
}

Eigen::VectorXd xi1(double value) {
  Eigen::VectorXd xi(1);
  xi << value;
  return xi;
}

const ComplexMatrix kRotation = mat2(0, 1, -1, 0);

// n = 2 system whose transformed blocks are scalars: Q = diag(0, -1) and an
// upper-triangular transport matrix, so H21 = 0 and the kernel has a closed
// form.
RelaxationSystem triangular_system(double upper_left, double coupling, double lower_right) {
  RelaxationSystem sys;
  sys.name = "triangular";
  sys.d = 1;
  sys.n = 2;
  Eigen::MatrixXd A(2, 2);
  A << upper_left, coupling, 0.0, lower_right;
  sys.A.push_back(A);
  sys.Q.resize(2, 2);
  sys.Q << 0, 0, 0, -1;
  return sys;
}

}  // namespace

TEST_CASE("integral_I: symmetric unit case") {
  CHECK(integral_I({0, 0, 1, 1}, 1e-10) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("integral_I: separated peaks, equal widths") {
  // d = 2: 4 (d+1) log(d+1) / (beta d (d+2)) = 1.5 log 3
  const double expected = 4.0 * 3.0 * std::log(3.0) / (1.0 * 2.0 * 4.0);
  CHECK(integral_I({2, 0, 1, 1}, 1e-10) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("integral_I: equal centers, distinct widths") {
  CHECK(integral_I({0, 0, 1, 2}, 1e-10) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("integral_I_closed: all branches") {
  REQUIRE(integral_I_closed({5, 5, 3, 3}).has_value());
  CHECK(*integral_I_closed({5, 5, 3, 3}) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

  REQUIRE(integral_I_closed({1, 0, 2, 2}).has_value());
  const double d = 0.5;
  const double expected = 4.0 * (d + 1) * std::log(d + 1) / (2.0 * d * (d + 2));
  CHECK(*integral_I_closed({1, 0, 2, 2}) == doctest::Approx(expected).epsilon(1e-14));

  CHECK_FALSE(integral_I_closed({0, 1, 1, 2}).has_value());
}

TEST_CASE("integral_I: quadrature agrees with the closed forms") {
  std::mt19937_64 g(41);
  for (int trial = 0; trial < 2000; ++trial) {
    IntegralQuery q;
    q.alpha1 = uniform(g, -100.0, 100.0);
    q.beta1 = std::pow(10.0, uniform(g, -3.0, 3.0));
    if (trial % 2 == 0) {
      q.alpha2 = uniform(g, -100.0, 100.0);
      q.beta2 = q.beta1;
    } else {
      q.alpha2 = q.alpha1;
      q.beta2 = std::pow(10.0, uniform(g, -3.0, 3.0));
    }
    const double closed = *integral_I_closed(q);
    const double quad = integral_I(q, 1e-10);
    CHECK(std::abs(quad - closed) <= 1e-8 * closed);
  }
}

TEST_CASE("integral_I: symmetry and translation invariance") {
  std::mt19937_64 g(42);
  for (int trial = 0; trial < 50; ++trial) {
    IntegralQuery q;
    q.alpha1 = uniform(g, -20.0, 20.0);
    q.alpha2 = uniform(g, -20.0, 20.0);
    q.beta1 = std::pow(10.0, uniform(g, -2.0, 2.0));
    q.beta2 = std::pow(10.0, uniform(g, -2.0, 2.0));
    const double base = integral_I(q, 1e-10);

    const double swapped = integral_I({q.alpha2, q.alpha1, q.beta2, q.beta1}, 1e-10);
    CHECK(std::abs(swapped - base) <= 1e-9 * base);

    const double shift = uniform(g, -5.0, 5.0);
    const double moved = integral_I({q.alpha1 + shift, q.alpha2 + shift, q.beta1, q.beta2}, 1e-10);
    CHECK(std::abs(moved - base) <= 1e-9 * base);
  }
}

TEST_CASE("check_lemma_3_1: equality at d = 0 and strictness elsewhere") {
  const BoundCheckResult boundary = check_lemma_3_1({0, 0, 1, 1});
  CHECK(boundary.holds);
  CHECK(boundary.lhs == doctest::Approx(boundary.rhs).epsilon(1e-9));

  const BoundCheckResult wide = check_lemma_3_1({3, -3, 0.5, 0.5});
  CHECK(wide.holds);
  CHECK(wide.lhs < 4.0);
  CHECK(wide.rhs == doctest::Approx(4.0));

  const BoundCheckResult mixed = check_lemma_3_1({1, -1, 0.1, 10});
  const double log_bound = 2.0 * (std::log(0.1) - std::log(10.0)) / (0.1 - 10.0);
  CHECK(mixed.holds);
  CHECK(mixed.rhs == doctest::Approx(log_bound).epsilon(1e-12));
}

TEST_CASE("delta_of: spectral gap against the axes") {
  CHECK(delta_of(kRotation) == doctest::Approx(1.0).epsilon(1e-12));

  ComplexMatrix D = ComplexMatrix::Zero(2, 2);
  D(0, 0) = -2.0;
  D(1, 1) = -3.0;
  CHECK(delta_of(D) == doctest::Approx(2.0).epsilon(1e-12));

  ComplexMatrix E = ComplexMatrix::Zero(3, 3);
  E(0, 0) = -0.1;
  E(1, 1) = Complex(0.0, 5.0);
  E(2, 2) = Complex(0.0, -5.0);
  CHECK(delta_of(E) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("delta_of: singular or unstable input is rejected") {
  ComplexMatrix singular = ComplexMatrix::Zero(2, 2);
  singular(1, 1) = -1.0;
  CHECK_THROWS_AS(delta_of(singular), PreconditionError);
  ComplexMatrix unstable(1, 1);
  unstable(0, 0) = 0.5;
  CHECK_THROWS_AS(delta_of(unstable), PreconditionError);
}

TEST_CASE("SmoothFunction: values, derivatives, and C1 data") {
  // f(s) = (1 + 2s + 3s^2, -s)
  Eigen::MatrixXcd coeffs(2, 3);
  coeffs << Complex(1, 0), Complex(2, 0), Complex(3, 0), Complex(0, 0), Complex(-1, 0),
      Complex(0, 0);
  const SmoothFunction f = SmoothFunction::polynomial(coeffs);
  CHECK((f.value(2.0) - (ComplexVector(2) << Complex(17, 0), Complex(-2, 0)).finished()).norm() <
        1e-14);
  CHECK((f.derivative(2.0) - (ComplexVector(2) << Complex(14, 0), Complex(-1, 0)).finished())
            .norm() < 1e-14);

  Eigen::MatrixXcd linear(1, 2);
  linear << Complex(0, 0), Complex(1, 0);
  CHECK(SmoothFunction::polynomial(linear).c1_norm(2.0) == doctest::Approx(2.0));

  Eigen::MatrixXcd trig(1, 3);
  trig << Complex(0, 0), Complex(1, 0), Complex(0, 0);  // cos(2s)
  const SmoothFunction h = SmoothFunction::trigonometric(trig, 2.0);
  CHECK(std::abs(h.value(0.5)[0] - Complex(std::cos(1.0), 0.0)) < 1e-14);
  CHECK(std::abs(h.derivative(0.5)[0] - Complex(-2.0 * std::sin(1.0), 0.0)) < 1e-14);
  CHECK(h.c1_norm(10.0) == doctest::Approx(2.0).epsilon(1e-4));

  Eigen::MatrixXcd too_big(1, 10);
  too_big.setZero();
  CHECK_THROWS_AS(SmoothFunction::polynomial(too_big), InvalidArgumentError);
}

TEST_CASE("grl_check: rotation block against the exact antiderivative") {
  Eigen::MatrixXcd coeffs(2, 1);
  coeffs << Complex(1, 0), Complex(0, 0);
  GrlCase kase{kRotation, ComplexMatrix::Zero(2, 2), SmoothFunction::polynomial(coeffs), 1.0,
               100.0};

  const BoundCheckResult result = grl_check(kase);
  CHECK(result.holds);
  CHECK(result.constants.at("K") == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(result.constants.at("delta") == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(result.constants.at("gamma") == doctest::Approx(1.0));

  // int_0^T e^{eta B (T-s)} f0 ds = eta^{-1} B^{-1} (e^{eta B T} - I) f0
  ComplexVector f0(2);
  f0 << 1.0, 0.0;
  const ComplexMatrix B_inv = kRotation.inverse();
  const ComplexVector exact =
      (B_inv / kase.eta) * ((mat_exp(kRotation, kase.eta * kase.T) -
                             ComplexMatrix::Identity(2, 2)) *
                            f0);
  CHECK(result.lhs == doctest::Approx(exact.norm()).epsilon(1e-8));
}

TEST_CASE("grl_check: scalar decay case against the by-parts formula") {
  Eigen::MatrixXcd coeffs(1, 2);
  coeffs << Complex(0, 0), Complex(1, 0);  // f(s) = s
  ComplexMatrix B(1, 1), M(1, 1);
  B(0, 0) = -1.0;
  M(0, 0) = 0.3;
  GrlCase kase{B, M, SmoothFunction::polynomial(coeffs), 2.0, 50.0};

  const BoundCheckResult result = grl_check(kase);
  CHECK(result.holds);

  // int_0^T e^{a(T-s)} s ds with a = -eta + 0.3, by parts:
  const double a = -kase.eta + 0.3;
  const double T = kase.T;
  const double exact =
      T * (std::exp(a * T) - 1.0) / a - (std::exp(a * T) * (a * T - 1.0) + 1.0) / (a * a);
  CHECK(result.lhs == doctest::Approx(std::abs(exact)).epsilon(1e-9));
}

TEST_CASE("grl_check: eta below the threshold is a precondition error") {
  Eigen::MatrixXcd coeffs(2, 1);
  coeffs << Complex(1, 0), Complex(0, 0);
  GrlCase kase{kRotation, ComplexMatrix::Zero(2, 2), SmoothFunction::polynomial(coeffs), 1.0, 2.0};
  CHECK_THROWS_WITH_AS(grl_check(kase), doctest::Contains("threshold"), PreconditionError);
}

TEST_CASE("grl_check: eta sweep keeps lhs/rhs below one and lhs eta / log eta bounded") {
  Eigen::MatrixXcd coeffs(2, 1);
  coeffs << Complex(1, 0), Complex(0, 0);
  for (double eta : {1e2, 1e3, 1e4, 1e5}) {
    GrlCase kase{kRotation, ComplexMatrix::Zero(2, 2), SmoothFunction::polynomial(coeffs), 1.0,
                 eta};
    const BoundCheckResult result = grl_check(kase);
    CHECK(result.holds);
    CHECK(result.lhs / result.rhs <= 1.0);
    CHECK(result.lhs * eta / std::log(eta) <= 0.5);  // |lhs| <= 2 / eta for this case
  }
}

TEST_CASE("g_bound_check: decoupled system has a vanishing kernel") {
  const RelaxationSystem sys = triangular_system(0.7, 0.0, -0.3);
  const BlockDecomposition decomp = block_decompose(sys);
  const GBoundConstants constants = instantiate_g_bound_constants(sys, decomp);
  const BoundCheckResult result = g_bound_check(sys, decomp, 1.0, xi1(1.0), 1e3, constants);
  CHECK(result.lhs == 0.0);
  CHECK(result.holds);
}

TEST_CASE("g_bound_check: osc3 eta sweep stays within the bound") {
  const RelaxationSystem sys = osc3_system();
  const BlockDecomposition decomp = block_decompose(sys);
  const GBoundConstants constants = instantiate_g_bound_constants(sys, decomp);
  CHECK(constants.family_available);

  double scaled_min = 1e300, scaled_max = 0.0;
  for (double eta : {1e2, 1e3, 1e4}) {
    const BoundCheckResult result = g_bound_check(sys, decomp, 1.0, xi1(1.0), eta, constants);
    CHECK(result.holds);
    const double scaled = result.lhs * eta / std::log(eta);
    scaled_min = std::min(scaled_min, scaled);
    scaled_max = std::max(scaled_max, scaled);
  }
  CHECK(scaled_max <= 10.0 * scaled_min);  // log-rate decay of ||G||
}

TEST_CASE("g_bound_check: jinxin margin is recorded") {
  const RelaxationSystem sys = jinxin_system(1.0, 0.5);
  const BlockDecomposition decomp = block_decompose(sys);
  const GBoundConstants constants = instantiate_g_bound_constants(sys, decomp);
  const BoundCheckResult result = g_bound_check(sys, decomp, 1.0, xi1(1.0), 1e3, constants);
  CHECK(result.holds);
  CHECK(result.lhs < result.rhs);
  CHECK(result.constants.count("observed_decay_exponent") == 1);
  CHECK(result.constants.at("K_B") >= 1.0);
}
