#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "relaxlab/relaxation.hpp"
#include "relaxlab/stability.hpp"
#define RELAXLAB_TESTUTIL_SYSTEMS
#include "test_util.hpp"

using namespace relaxlab;
using testutil::random_symmetric_skew_system;
using testutil::uniform;

namespace {

Eigen::VectorXd xi1(double value) {
  Eigen::VectorXd xi(1);
  xi << value;
  return xi;
}

}  // namespace

TEST_CASE("block_decompose: jinxin kernel and fast block") {
  const RelaxationSystem sys = jinxin_system(1.0, 0.5);
  const BlockDecomposition decomp = block_decompose(sys);
  CHECK(decomp.r == 1);
  CHECK(std::abs(decomp.B(0, 0) - Complex(-1.0, 0.0)) < 1e-12);

  // P Q P^{-1} = diag(0, -1)
  ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
  expected(1, 1) = -1.0;
  CHECK(operator_norm(decomp.transformed_Q - expected) < 1e-12);

  // transformed transport matrix: [[b, 1], [a^2 - b^2, -b]] up to the kernel
  // basis scaling, so check the invariant entries: trace and determinant
  const ComplexMatrix At = decomp.transformed_A[0];
  CHECK(std::abs(At.trace()) < 1e-12);
  CHECK(std::abs(At.determinant() - Complex(-1.0, 0.0)) < 1e-12);
  // the slow-slow entry is the reduced transport speed b
  CHECK(std::abs(At(0, 0) - Complex(0.5, 0.0)) < 1e-12);
}

TEST_CASE("block_decompose: already block-diagonal Q keeps P = I") {
  RelaxationSystem sys;
  sys.name = "diag";
  sys.d = 1;
  sys.n = 3;
  sys.A.push_back(Eigen::MatrixXd::Identity(3, 3));
  sys.Q = Eigen::MatrixXd::Zero(3, 3);
  sys.Q(2, 2) = -2.0;

  const BlockDecomposition decomp = block_decompose(sys);
  CHECK(decomp.r == 1);
  CHECK(std::abs(decomp.B(0, 0) - Complex(-2.0, 0.0)) < 1e-14);
  CHECK(operator_norm(decomp.P - ComplexMatrix::Identity(3, 3)) == 0.0);
}

TEST_CASE("block_decompose: defective zero eigenvalue is an error") {
  RelaxationSystem sys;
  sys.name = "defective";
  sys.d = 1;
  sys.n = 2;
  sys.A.push_back(Eigen::MatrixXd::Identity(2, 2));
  sys.Q = Eigen::MatrixXd::Zero(2, 2);
  sys.Q(0, 1) = 1.0;
  CHECK_THROWS_AS(block_decompose(sys), DecompositionError);
}

TEST_CASE("block_decompose: round trip on random skew relaxation matrices") {
  std::mt19937_64 g(31);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = 3 + static_cast<int>(uniform(g, 0.0, 1.99));
    const int r = 2;
    const RelaxationSystem sys = random_symmetric_skew_system(g, n, r);
    const BlockDecomposition decomp = block_decompose(sys);
    CHECK(decomp.r == r);

    const double q_norm = operator_norm(sys.Q.cast<Complex>());
    CHECK(operator_norm(decomp.P * decomp.P_inv - ComplexMatrix::Identity(n, n)) <=
          1e-10 * decomp.kappa_P);
    ComplexMatrix block_form = ComplexMatrix::Zero(n, n);
    block_form.bottomRightCorner(r, r) = decomp.B;
    CHECK(operator_norm(decomp.P_inv * block_form * decomp.P - sys.Q.cast<Complex>()) <=
          1e-8 * std::max(q_norm, 1.0));
  }
}

TEST_CASE("symbol: pure relaxation direction is block diagonal") {
  const RelaxationSystem sys = jinxin_system(1.0, 0.5);
  const BlockDecomposition decomp = block_decompose(sys);
  const SymbolBlocks blocks = symbol(sys, decomp, xi1(0.0), 1.0);
  CHECK(operator_norm(blocks.H - decomp.transformed_Q) < 1e-14);
  CHECK(operator_norm(blocks.H12) == 0.0);
  CHECK(operator_norm(blocks.H21) == 0.0);
}

TEST_CASE("symbol: transport direction and the reduced speed") {
  const RelaxationSystem sys = jinxin_system(1.0, 0.5);
  const BlockDecomposition decomp = block_decompose(sys);
  const SymbolBlocks blocks = symbol(sys, decomp, xi1(1.0), 0.0);
  // eta = 0: H = -i xi A' and the (1,1) entry is the reduced speed -i b
  ComplexMatrix expected = Complex(0.0, -1.0) * decomp.transformed_A[0];
  CHECK(operator_norm(blocks.H - expected) == 0.0);
  CHECK(std::abs(blocks.H11(0, 0) - Complex(0.0, -0.5)) < 1e-12);
}

TEST_CASE("symbol: exact homogeneity under power-of-two scalings") {
  const RelaxationSystem sys = osc3_system();
  const BlockDecomposition decomp = block_decompose(sys);
  std::mt19937_64 g(32);
  for (int trial = 0; trial < 100; ++trial) {
    const double xi = uniform(g, -3.0, 3.0);
    const double eta = uniform(g, 0.0, 3.0);
    const double omega = std::pow(2.0, static_cast<int>(uniform(g, -10.0, 10.0)));
    const ComplexMatrix lhs = symbol(sys, decomp, xi1(omega * xi), omega * eta).H;
    const ComplexMatrix rhs = omega * symbol(sys, decomp, xi1(xi), eta).H;
    CHECK(operator_norm(lhs - rhs) == 0.0);
  }
}

TEST_CASE("symbol: eta must be nonnegative") {
  const RelaxationSystem sys = osc3_system();
  const BlockDecomposition decomp = block_decompose(sys);
  CHECK_THROWS_AS(symbol(sys, decomp, xi1(1.0), -0.5), InvalidArgumentError);
}

TEST_CASE("family_scan: osc3 semigroups are exactly orthogonal") {
  const RelaxationSystem sys = osc3_system();
  const BlockDecomposition decomp = block_decompose(sys);
  const FamilyScanReport report = family_scan(sys, decomp, Family::F0, 101, 50.0, 120);
  CHECK(report.all_quasi_stable);
  CHECK(report.worst_sup <= 1.0 + 1e-9);
  CHECK(report.kappa_P == doctest::Approx(1.0));

  const FamilyScanReport f2 = family_scan(sys, decomp, Family::F2, 101, 50.0, 120);
  CHECK(f2.all_quasi_stable);
  CHECK(f2.worst_sup <= 1.0 + 1e-9);
}

TEST_CASE("family_scan: jinxin reduced symbol is a pure phase") {
  const RelaxationSystem sys = jinxin_system(1.0, 0.5);
  const BlockDecomposition decomp = block_decompose(sys);
  const FamilyScanReport report = family_scan(sys, decomp, Family::F1, 16, 20.0, 60);
  CHECK(report.all_quasi_stable);
  CHECK(report.worst_sup <= 1.0 + 1e-12);
}

TEST_CASE("family_scan: weakly hyperbolic counterexample fails at eta = 0") {
  RelaxationSystem sys;
  sys.name = "weak";
  sys.d = 1;
  sys.n = 2;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
  A(0, 1) = 1.0;
  sys.A.push_back(A);
  sys.Q = Eigen::MatrixXd::Zero(2, 2);

  const BlockDecomposition decomp = block_decompose(sys);
  CHECK(decomp.r == 0);
  const FamilyScanReport report = family_scan(sys, decomp, Family::F0, 33, 10.0, 60);
  CHECK_FALSE(report.all_quasi_stable);
  CHECK(is_stiffly_well_posed(sys, decomp, 33, 10.0) == Verdict::fail);
}

TEST_CASE("family_scan: nested direction refinement never decreases the worst sup") {
  const RelaxationSystem sys = jinxin_system(1.0, 0.5);
  const BlockDecomposition decomp = block_decompose(sys);
  const double coarse = family_scan(sys, decomp, Family::F0, 51, 30.0, 150).worst_sup;
  const double fine = family_scan(sys, decomp, Family::F0, 101, 30.0, 150).worst_sup;
  CHECK(fine >= coarse - 1e-12);
}

TEST_CASE("is_stiffly_well_posed: built-ins pass") {
  {
    const RelaxationSystem sys = osc3_system();
    const BlockDecomposition decomp = block_decompose(sys);
    CHECK(is_stiffly_well_posed(sys, decomp, 65, 50.0) == Verdict::pass);
  }
  {
    const RelaxationSystem sys = jinxin_system(1.0, 0.5);
    const BlockDecomposition decomp = block_decompose(sys);
    CHECK(is_stiffly_well_posed(sys, decomp, 65, 50.0) == Verdict::pass);
  }
}

TEST_CASE("system JSON: write and reload the built-ins") {
  for (const RelaxationSystem& sys : {osc3_system(), jinxin_system(1.0, 0.5)}) {
    std::string path = "roundtrip_test.json";
    {
      std::ofstream out(path);
      out << "{\"name\": \"" << "roundtrip" << "\", \"d\": " << sys.d << ", \"n\": " << sys.n
          << ", \"A\": [";
      for (int k = 0; k < sys.d; ++k) {
        if (k) out << ", ";
        out << "[";
        for (int i = 0; i < sys.n; ++i) {
          if (i) out << ", ";
          out << "[";
          for (int j = 0; j < sys.n; ++j) {
            if (j) out << ", ";
            out << sys.A[k](i, j);
          }
          out << "]";
        }
        out << "]";
      }
      out << "], \"Q\": [";
      for (int i = 0; i < sys.n; ++i) {
        if (i) out << ", ";
        out << "[";
        for (int j = 0; j < sys.n; ++j) {
          if (j) out << ", ";
          out << sys.Q(i, j);
        }
        out << "]";
      }
      out << "]}";
    }
    const RelaxationSystem loaded = load_system(path);
    CHECK((loaded.Q - sys.Q).norm() == 0.0);
    CHECK((loaded.A[0] - sys.A[0]).norm() == 0.0);
    std::remove(path.c_str());
  }
}

TEST_CASE("system JSON: schema violations name the offending path") {
  const char* missing_q = R"({"name": "x", "d": 1, "n": 2, "A": [[[0, 1], [1, 0]]]})";
  CHECK_THROWS_WITH_AS(load_system_from_json(missing_q, "t"), doctest::Contains("Q"),
                       SchemaError);

  const char* bad_entry =
      R"({"name": "x", "d": 1, "n": 2, "A": [[[0, "1"], [1, 0]]], "Q": [[0, 0], [0, -1]]})";
  CHECK_THROWS_WITH_AS(load_system_from_json(bad_entry, "t"), doctest::Contains("A[0][0][1]"),
                       SchemaError);

  const char* short_row =
      R"({"name": "x", "d": 1, "n": 2, "A": [[[0, 1], [1]]], "Q": [[0, 0], [0, -1]]})";
  CHECK_THROWS_WITH_AS(load_system_from_json(short_row, "t"), doctest::Contains("A[0][1]"),
                       SchemaError);

  const char* extra_key =
      R"({"name": "x", "d": 1, "n": 2, "A": [[[0, 1], [1, 0]]], "Q": [[0, 0], [0, -1]], "eps": 1})";
  CHECK_THROWS_WITH_AS(load_system_from_json(extra_key, "t"), doctest::Contains("eps"),
                       SchemaError);
}

TEST_CASE("parse_system_spec: built-in names with inline parameters") {
  const RelaxationSystem jx = parse_system_spec("jinxin:a=2,b=0.25");
  CHECK(jx.A[0](1, 0) == doctest::Approx(4.0));
  CHECK(jx.Q(1, 0) == doctest::Approx(0.25));

  const RelaxationSystem o3 = parse_system_spec("osc3");
  CHECK(o3.n == 3);

  CHECK_THROWS_AS(parse_system_spec("jinxin:c=1"), InvalidArgumentError);
  CHECK_THROWS_AS(parse_system_spec("osc3:a=1"), InvalidArgumentError);
  CHECK_THROWS_AS(parse_system_spec("missing_file.json"), SchemaError);
}
