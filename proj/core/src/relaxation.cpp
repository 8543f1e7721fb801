#include "relaxlab/relaxation.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "relaxlab/stability.hpp"

namespace relaxlab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGoldenAngle = 2.39996322972865332;  // pi (3 - sqrt 5)

using nlohmann::json;

Eigen::MatrixXd parse_matrix(const json& value, int n, const std::string& path) {
  if (!value.is_array() || static_cast<int>(value.size()) != n) {
    throw SchemaError(path + ": expected an array of " + std::to_string(n) + " rows");
  }
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = value[i];
    const std::string row_path = path + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw SchemaError(row_path + ": expected an array of " + std::to_string(n) + " numbers");
    }
    for (int j = 0; j < n; ++j) {
      const json& entry = row[j];
      const std::string entry_path = row_path + "[" + std::to_string(j) + "]";
      if (!entry.is_number()) throw SchemaError(entry_path + ": expected a number");
      const double x = entry.get<double>();
      if (!std::isfinite(x)) throw SchemaError(entry_path + ": entry is not finite");
      M(i, j) = x;
    }
  }
  return M;
}

}  // namespace

void RelaxationSystem::validate() const {
  if (d < 1) throw InvalidArgumentError("RelaxationSystem: d must be >= 1");
  if (n < 2) throw InvalidArgumentError("RelaxationSystem: n must be >= 2");
  if (n > kMaxDim) {
    throw InvalidArgumentError("RelaxationSystem: n exceeds the supported maximum " +
                               std::to_string(kMaxDim));
  }
  if (static_cast<int>(A.size()) != d) {
    throw InvalidArgumentError("RelaxationSystem: expected " + std::to_string(d) +
                               " coefficient matrices, got " + std::to_string(A.size()));
  }
  const auto check = [this](const Eigen::MatrixXd& M, const std::string& who) {
    if (M.rows() != n || M.cols() != n) {
      throw InvalidArgumentError("RelaxationSystem: " + who + " must be " + std::to_string(n) +
                                 "x" + std::to_string(n));
    }
    if (!M.allFinite()) throw InvalidArgumentError("RelaxationSystem: " + who + " has NaN/Inf");
  };
  for (int j = 0; j < d; ++j) check(A[j], "A[" + std::to_string(j) + "]");
  check(Q, "Q");
}

RelaxationSystem jinxin_system(double a, double b) {
  RelaxationSystem sys;
  std::ostringstream name;
  name << "jinxin(a=" << a << ",b=" << b << ")";
  sys.name = name.str();
  sys.d = 1;
  sys.n = 2;
  Eigen::MatrixXd A(2, 2);
  A << 0, 1, a * a, 0;
  sys.A.push_back(A);
  sys.Q.resize(2, 2);
  sys.Q << 0, 0, b, -1;
  sys.validate();
  return sys;
}

RelaxationSystem osc3_system() {
  RelaxationSystem sys;
  sys.name = "osc3";
  sys.d = 1;
  sys.n = 3;
  Eigen::MatrixXd A(3, 3);
  A << 0, 1, 0, 1, 0, 1, 0, 1, 0;
  sys.A.push_back(A);
  sys.Q.resize(3, 3);
  sys.Q << 0, 0, 0, 0, 0, 1, 0, -1, 0;
  sys.validate();
  return sys;
}

RelaxationSystem load_system_from_json(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(origin + ": " + e.what());
  }
  if (!j.is_object()) throw SchemaError(origin + ": top-level value must be an object");

  static const std::set<std::string> allowed{"name", "d", "n", "A", "Q"};
  for (const auto& item : j.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      throw SchemaError(origin + ": unexpected key \"" + item.key() + "\"");
    }
  }
  for (const auto& key : allowed) {
    if (!j.contains(key)) throw SchemaError(origin + ": missing key \"" + key + "\"");
  }

  RelaxationSystem sys;
  if (!j["name"].is_string()) throw SchemaError(origin + ": name: expected a string");
  sys.name = j["name"].get<std::string>();
  if (!j["d"].is_number_integer()) throw SchemaError(origin + ": d: expected an integer");
  sys.d = j["d"].get<int>();
  if (!j["n"].is_number_integer()) throw SchemaError(origin + ": n: expected an integer");
  sys.n = j["n"].get<int>();
  if (sys.d < 1) throw SchemaError(origin + ": d: must be >= 1");
  if (sys.n < 2) throw SchemaError(origin + ": n: must be >= 2");

  const json& A = j["A"];
  if (!A.is_array() || static_cast<int>(A.size()) != sys.d) {
    throw SchemaError(origin + ": A: expected an array of " + std::to_string(sys.d) + " matrices");
  }
  for (int k = 0; k < sys.d; ++k) {
    sys.A.push_back(parse_matrix(A[k], sys.n, origin + ": A[" + std::to_string(k) + "]"));
  }
  sys.Q = parse_matrix(j["Q"], sys.n, origin + ": Q");
  sys.validate();
  return sys;
}

RelaxationSystem load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_system_from_json(buffer.str(), path);
}

RelaxationSystem parse_system_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string params =
      (colon == std::string::npos) ? std::string() : spec.substr(colon + 1);

  if (head == "osc3") {
    if (!params.empty()) throw InvalidArgumentError("osc3 takes no parameters");
    return osc3_system();
  }
  if (head == "jinxin") {
    double a = 1.0, b = 0.5;
    std::istringstream stream(params);
    std::string token;
    while (std::getline(stream, token, ',')) {
      if (token.empty()) continue;
      const auto eq = token.find('=');
      if (eq == std::string::npos) {
        throw InvalidArgumentError("jinxin parameter \"" + token + "\" is not of the form k=v");
      }
      const std::string key = token.substr(0, eq);
      double value = 0.0;
      try {
        value = std::stod(token.substr(eq + 1));
      } catch (const std::exception&) {
        throw InvalidArgumentError("jinxin parameter \"" + token + "\": bad number");
      }
      if (key == "a") {
        a = value;
      } else if (key == "b") {
        b = value;
      } else {
        throw InvalidArgumentError("jinxin parameter \"" + key + "\" is not one of {a, b}");
      }
    }
    return jinxin_system(a, b);
  }
  return load_system(spec);
}

BlockDecomposition block_decompose(const RelaxationSystem& system, double rel_tol) {
  system.validate();
  const int n = system.n;
  const ComplexMatrix Qc = system.Q.cast<Complex>();
  const double q_norm = operator_norm(Qc);
  const Spectrum spec = spectrum(Qc, rel_tol);

  // Locate the zero cluster and insist it is semi-simple.
  int zero_alg = 0;
  for (const auto& c : spec.clusters) {
    if (std::abs(c.value) <= spec.clustering_tol) {
      zero_alg = c.algebraic;
      if (c.geometric < c.algebraic) {
        std::ostringstream os;
        os << "block_decompose: zero eigenvalue of Q is defective (algebraic " << c.algebraic
           << ", geometric " << c.geometric << ")";
        throw DecompositionError(os.str());
      }
      break;
    }
  }

  BlockDecomposition decomp;
  decomp.r = n - zero_alg;

  const auto finish = [&](const RelaxationSystem& sys) {
    decomp.transformed_Q = decomp.P * sys.Q.cast<Complex>() * decomp.P_inv;
    for (const auto& Aj : sys.A) {
      decomp.transformed_A.push_back(decomp.P * Aj.cast<Complex>() * decomp.P_inv);
    }
    decomp.kappa_P = operator_norm(decomp.P) * operator_norm(decomp.P_inv);
    decomp.B = decomp.transformed_Q.bottomRightCorner(decomp.r, decomp.r);

    // P Q P^{-1} must reproduce diag(0, B) to the documented accuracy.
    ComplexMatrix block_form = ComplexMatrix::Zero(n, n);
    block_form.bottomRightCorner(decomp.r, decomp.r) = decomp.B;
    if (operator_norm(decomp.transformed_Q - block_form) > 1e-8 * std::max(q_norm, 1.0)) {
      throw DecompositionError("block_decompose: transformed Q does not have the block form");
    }
  };

  const int k = zero_alg;
  const bool already_block = (k == 0) || (k == n) ||
                             (system.Q.topLeftCorner(k, k).isZero(0.0) &&
                              system.Q.topRightCorner(k, n - k).isZero(0.0) &&
                              system.Q.bottomLeftCorner(n - k, k).isZero(0.0));
  if (already_block) {
    decomp.P = ComplexMatrix::Identity(n, n);
    decomp.P_inv = ComplexMatrix::Identity(n, n);
    finish(system);
    return decomp;
  }

  // General case: columns of P^{-1} are an orthonormal kernel basis followed
  // by an orthonormal range basis. For a semi-simple zero eigenvalue,
  // ker(Q) + range(Q) spans everything, so this P is invertible.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(system.Q, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double cutoff = rel_tol * std::max(q_norm, 1.0);
  int rank = 0;
  for (int i = 0; i < n; ++i) {
    if (svd.singularValues()[i] > cutoff) ++rank;
  }
  if (n - rank != zero_alg) {
    std::ostringstream os;
    os << "block_decompose: kernel dimension " << (n - rank)
       << " does not match the zero eigenvalue multiplicity " << zero_alg;
    throw DecompositionError(os.str());
  }

  Eigen::MatrixXd basis(n, n);
  basis.leftCols(n - rank) = svd.matrixV().rightCols(n - rank);
  basis.rightCols(rank) = svd.matrixU().leftCols(rank);

  // Scale each basis vector by its largest entry. This pins an otherwise
  // arbitrary normalization (for the jinxin system it reproduces the
  // textbook P with kernel vector (1, b)), at a conditioning cost of at
  // most sqrt(n) per column.
  for (int j = 0; j < n; ++j) {
    int pivot = 0;
    basis.col(j).cwiseAbs().maxCoeff(&pivot);
    basis.col(j) /= basis(pivot, j);
  }

  decomp.P_inv = basis.cast<Complex>();
  Eigen::FullPivLU<ComplexMatrix> lu(decomp.P_inv);
  if (!lu.isInvertible()) {
    throw DecompositionError("block_decompose: kernel/range basis is singular");
  }
  decomp.P = lu.inverse();
  finish(system);
  return decomp;
}

SymbolBlocks symbol(const RelaxationSystem& system, const BlockDecomposition& decomp,
                    const Eigen::VectorXd& xi, double eta) {
  if (xi.size() != system.d) {
    throw InvalidArgumentError("symbol: xi must have dimension " + std::to_string(system.d));
  }
  if (!(eta >= 0.0)) throw InvalidArgumentError("symbol: eta must be >= 0");
  if (static_cast<int>(decomp.P.rows()) != system.n) {
    throw InvalidArgumentError("symbol: decomposition does not match the system dimension");
  }

  const int n = system.n;
  const Complex minus_i(0.0, -1.0);
  SymbolBlocks blocks;
  blocks.xi = xi;
  blocks.eta = eta;
  blocks.H = eta * decomp.transformed_Q;
  for (int j = 0; j < system.d; ++j) {
    blocks.H += (minus_i * xi[j]) * decomp.transformed_A[j];
  }
  const int slow = n - decomp.r;
  blocks.H11 = blocks.H.topLeftCorner(slow, slow);
  blocks.H12 = blocks.H.topRightCorner(slow, decomp.r);
  blocks.H21 = blocks.H.bottomLeftCorner(decomp.r, slow);
  blocks.H22 = blocks.H.bottomRightCorner(decomp.r, decomp.r);
  return blocks;
}

const char* family_name(Family f) {
  switch (f) {
    case Family::F0:
      return "F0";
    case Family::F1:
      return "F1";
    case Family::F2:
      return "F2";
  }
  return "?";
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "?";
}

namespace {

struct Direction {
  Eigen::VectorXd xi;
  double eta;
};

// Unit sphere in xi (eta = 0) for F1; hemisphere |xi|^2 + eta^2 = 1, eta >= 0
// for F0 and F2.
std::vector<Direction> make_directions(int d, Family family, int count) {
  std::vector<Direction> dirs;
  count = std::max(count, 2);

  const auto sphere_points = [](int dim, int m) {
    std::vector<Eigen::VectorXd> pts;
    if (dim == 1) {
      Eigen::VectorXd plus(1), minus(1);
      plus << 1.0;
      minus << -1.0;
      pts.push_back(plus);
      pts.push_back(minus);
    } else if (dim == 2) {
      for (int k = 0; k < m; ++k) {
        const double phi = 2.0 * kPi * k / m;
        Eigen::VectorXd v(2);
        v << std::cos(phi), std::sin(phi);
        pts.push_back(v);
      }
    } else {
      // Fibonacci lattice on S^2.
      for (int k = 0; k < m; ++k) {
        const double z = 1.0 - 2.0 * (k + 0.5) / m;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = kGoldenAngle * k;
        Eigen::VectorXd v(3);
        v << rho * std::cos(phi), rho * std::sin(phi), z;
        pts.push_back(v);
      }
    }
    return pts;
  };

  if (family == Family::F1) {
    for (auto& v : sphere_points(d, count)) dirs.push_back({v, 0.0});
    return dirs;
  }

  if (d == 1) {
    // Semicircle xi = cos(theta), eta = sin(theta), theta in [0, pi].
    for (int k = 0; k < count; ++k) {
      const double theta = kPi * k / (count - 1);
      Eigen::VectorXd xi(1);
      xi << std::cos(theta);
      dirs.push_back({xi, std::abs(std::sin(theta))});
    }
  } else if (d == 2) {
    // Fibonacci lattice on the upper hemisphere of S^2 plus the eta = 0 equator.
    const int equator = std::max(8, count / 8);
    const int bulk = std::max(count - equator, 1);
    for (int k = 0; k < bulk; ++k) {
      const double eta = (k + 0.5) / bulk;
      const double rho = std::sqrt(std::max(0.0, 1.0 - eta * eta));
      const double phi = kGoldenAngle * k;
      Eigen::VectorXd xi(2);
      xi << rho * std::cos(phi), rho * std::sin(phi);
      dirs.push_back({xi, eta});
    }
    for (auto& v : sphere_points(2, equator)) dirs.push_back({v, 0.0});
  } else {
    // Tensor grid: polar angle against the eta axis times a sphere lattice.
    const int polar = std::max(4, static_cast<int>(std::sqrt(count / 8.0)));
    const int per_shell = std::max(count / polar, 8);
    const auto shell = sphere_points(d, per_shell);
    for (int i = 0; i < polar; ++i) {
      const double psi = 0.5 * kPi * i / (polar - 1);  // psi = 0 is the eta = 0 equator
      for (const auto& v : shell) {
        dirs.push_back({std::cos(psi) * v, std::sin(psi)});
      }
    }
    Eigen::VectorXd origin = Eigen::VectorXd::Zero(d);
    dirs.push_back({origin, 1.0});
  }
  return dirs;
}

}  // namespace

FamilyScanReport family_scan(const RelaxationSystem& system, const BlockDecomposition& decomp,
                             Family family, int directions, double t_max, int t_samples) {
  system.validate();
  if (!(t_max > 0.0)) throw InvalidArgumentError("family_scan: t_max must be > 0");

  FamilyScanReport report;
  report.family = family;
  report.kappa_P = decomp.kappa_P;
  report.all_quasi_stable = true;
  report.worst_sup = 1.0;
  report.worst_xi = Eigen::VectorXd::Zero(system.d);
  report.worst_eta = 0.0;

  const int slow = decomp.slow_dim();
  if ((family == Family::F1 && slow == 0) || (family == Family::F2 && decomp.r == 0)) {
    return report;  // empty family is vacuously uniformly quasi-stable
  }

  const std::vector<Direction> dirs = make_directions(system.d, family, directions);
  report.directions = static_cast<int>(dirs.size());

  for (const auto& dir : dirs) {
    const SymbolBlocks blocks = symbol(system, decomp, dir.xi, dir.eta);
    ComplexMatrix H;
    switch (family) {
      case Family::F0:
        H = blocks.H;
        break;
      case Family::F1:
        H = blocks.H11;
        break;
      case Family::F2:
        H = blocks.H22;
        break;
    }

    DirectionResult row;
    row.xi = dir.xi;
    row.eta = dir.eta;
    row.quasi_stable = is_quasi_stable(H).quasi_stable;
    try {
      row.sup_norm = sup_semigroup_norm(H, t_max, t_samples).value;
    } catch (const OverflowError&) {
      row.sup_norm = std::numeric_limits<double>::infinity();
    }

    if (!row.quasi_stable) report.all_quasi_stable = false;
    if (row.sup_norm > report.worst_sup) {
      report.worst_sup = row.sup_norm;
      report.worst_xi = dir.xi;
      report.worst_eta = dir.eta;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

Verdict is_stiffly_well_posed(const RelaxationSystem& system, const BlockDecomposition& decomp,
                              int directions, double t_max, double threshold) {
  const FamilyScanReport report = family_scan(system, decomp, Family::F0, directions, t_max);
  if (!report.all_quasi_stable) return Verdict::fail;
  if (report.worst_sup > threshold) return Verdict::inconclusive;
  return Verdict::pass;
}

}  // namespace relaxlab
