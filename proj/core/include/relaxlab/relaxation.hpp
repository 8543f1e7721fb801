#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "relaxlab/linalg.hpp"

namespace relaxlab {

/// A linear hyperbolic relaxation system: d coefficient matrices A_j and the
/// relaxation matrix Q, all real n x n constants.
struct RelaxationSystem {
  std::string name;
  int d = 0;
  int n = 0;
  std::vector<Eigen::MatrixXd> A;
  Eigen::MatrixXd Q;

  void validate() const;  // throws InvalidArgumentError on shape/finiteness violations
};

/// Built-in 2x2 system with A = [[0,1],[a^2,0]], Q = [[0,0],[b,-1]].
/// Dissipative fast dynamics; |b| < a is the classical subcharacteristic regime.
RelaxationSystem jinxin_system(double a, double b);

/// Built-in 3x3 system with symmetric A and skew-symmetric Q whose fast block
/// is a pure rotation: oscillatory fast dynamics, stiffly well-posed.
RelaxationSystem osc3_system();

/// Load a system from a JSON file with schema
/// {"name": str, "d": int, "n": int, "A": [d row-major matrices], "Q": matrix}.
/// Throws SchemaError naming the offending path on any mismatch.
RelaxationSystem load_system(const std::string& path);
RelaxationSystem load_system_from_json(const std::string& text, const std::string& origin);

/// Resolve "osc3", "jinxin:a=1,b=0.5", or a file path to a system.
RelaxationSystem parse_system_spec(const std::string& spec);

/// Similarity transformation separating the kernel of Q from its complement:
/// P Q P^{-1} = diag(0_{n-r}, B) with B invertible on the nonzero spectral part.
struct BlockDecomposition {
  ComplexMatrix P;
  ComplexMatrix P_inv;
  int r = 0;  // fast-block size
  ComplexMatrix B;
  std::vector<ComplexMatrix> transformed_A;  // P A_j P^{-1}
  ComplexMatrix transformed_Q;               // P Q P^{-1}
  double kappa_P = 1.0;                      // ||P|| * ||P^{-1}||

  int slow_dim() const { return static_cast<int>(P.rows()) - r; }
};

/// Computes the block decomposition of Q. Throws DecompositionError when the
/// zero eigenvalue of Q is defective (geometric < algebraic at tolerance).
BlockDecomposition block_decompose(const RelaxationSystem& system, double rel_tol = kDefaultRelTol);

/// The symbol H(xi, eta) = eta Q' - i sum_j xi_j A'_j in transformed
/// coordinates, partitioned into slow/fast blocks.
struct SymbolBlocks {
  ComplexMatrix H;
  ComplexMatrix H11, H12, H21, H22;
  Eigen::VectorXd xi;
  double eta = 0.0;
};

SymbolBlocks symbol(const RelaxationSystem& system, const BlockDecomposition& decomp,
                    const Eigen::VectorXd& xi, double eta);

enum class Family { F0, F1, F2 };

const char* family_name(Family f);

/// Scan result for one direction of a symbol family.
struct DirectionResult {
  Eigen::VectorXd xi;
  double eta = 0.0;
  bool quasi_stable = false;
  double sup_norm = 0.0;
};

struct FamilyScanReport {
  Family family = Family::F0;
  int directions = 0;
  bool all_quasi_stable = false;
  double worst_sup = 1.0;
  Eigen::VectorXd worst_xi;
  double worst_eta = 0.0;
  double kappa_P = 1.0;  // transformed-coordinate sups are within this factor of original
  std::vector<DirectionResult> rows;
};

/// Scans a symbol family for uniform quasi-stability over unit directions
/// (homogeneity reduces rays to directions: H(w xi, w eta) = w H(xi, eta)).
/// F0 and F2 scan the hemisphere |xi|^2 + eta^2 = 1, eta >= 0; F1 scans the
/// unit sphere in xi at eta = 0. Non-quasi-stable directions are recorded,
/// not thrown.
FamilyScanReport family_scan(const RelaxationSystem& system, const BlockDecomposition& decomp,
                             Family family, int directions, double t_max, int t_samples = 200);

enum class Verdict { pass, fail, inconclusive };

const char* verdict_name(Verdict v);

/// Evidence-gathering scan for stiff well-posedness (F0 uniformly
/// quasi-stable): fail when some direction is not quasi-stable, pass when all
/// are and the worst sup is below threshold, inconclusive otherwise.
Verdict is_stiffly_well_posed(const RelaxationSystem& system, const BlockDecomposition& decomp,
                              int directions, double t_max, double threshold = 1e3);

}  // namespace relaxlab
