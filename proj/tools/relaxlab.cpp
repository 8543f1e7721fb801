// relaxlab: stability scans, lemma verification batteries, and convergence
// studies for linear hyperbolic relaxation systems, over an exact
// Fourier-space solver. Emits deterministic CSV; exits nonzero whenever an
// asserted inequality fails.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "relaxlab/bounds.hpp"
#include "relaxlab/errors.hpp"
#include "relaxlab/linalg.hpp"
#include "relaxlab/relaxation.hpp"
#include "relaxlab/spectral.hpp"
#include "relaxlab/stability.hpp"

namespace {

using namespace relaxlab;

// Conventions ride with the data: inequality verdicts depend on them.
constexpr const char* kCsvBanner = "# relaxlab v1, natural-log, spectral-norm";

std::string fmt(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.12g", x);
  return buffer;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InvalidArgumentError("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<double> parse_eps_list(const std::string& text) {
  std::vector<double> eps;
  std::istringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    if (token.empty()) continue;
    eps.push_back(std::stod(token));
  }
  if (eps.empty()) throw InvalidArgumentError("--eps: empty list");
  return eps;
}

ComplexMatrix load_matrix_file(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path + ": cannot open file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw SchemaError(path + ": expected a " + std::to_string(n) + "x" + std::to_string(n) +
                      " matrix as nested arrays");
  }
  ComplexMatrix M(n, n);
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != n) {
      throw SchemaError(path + ": row " + std::to_string(i) + " must have " + std::to_string(n) +
                        " numbers");
    }
    for (int k = 0; k < n; ++k) {
      if (!j[i][k].is_number()) {
        throw SchemaError(path + ": entry [" + std::to_string(i) + "][" + std::to_string(k) +
                          "] must be a number");
      }
      M(i, k) = j[i][k].get<double>();
    }
  }
  return M;
}

double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(g() >> 11) * 0x1.0p-53);
}

Eigen::VectorXd xi1(double value) {
  Eigen::VectorXd xi(1);
  xi << value;
  return xi;
}

struct CommonOptions {
  std::string system_spec;
  std::string out_path;
  double t = 1.0;
  double t_max = 50.0;
  double tol = kDefaultRelTol;
  int grid = 129;
  int cutoff = 64;
  double beta_tilde = 10.0;
  std::uint64_t seed = 0;
  std::string eps_text = "1e-1,1e-2,1e-3,1e-4";
  int samples = 10000;
};

int run_check(const CommonOptions& opt, const std::string& a0_path, bool strong) {
  const RelaxationSystem sys = parse_system_spec(opt.system_spec);
  const BlockDecomposition decomp = block_decompose(sys, opt.tol);
  Output out(opt.out_path);
  std::ostream& os = out.stream();
  os << kCsvBanner << "\n";

  const StabilityReport q_report = is_quasi_stable(sys.Q.cast<Complex>(), opt.tol);
  os << "system," << sys.name << "\n";
  os << "n," << sys.n << "\nfast_block_r," << decomp.r << "\nkappa_P," << fmt(decomp.kappa_P)
     << "\n";
  os << "Q_quasi_stable," << (q_report.quasi_stable ? "true" : "false") << "\n";

  ComplexMatrix A0;
  if (!a0_path.empty()) {
    A0 = load_matrix_file(a0_path, sys.n);
  } else if (opt.system_spec.rfind("jinxin", 0) == 0) {
    // canonical candidate symmetrizer diag(a^2 - b^2, 1) in transformed coordinates
    const double a2 = sys.A[0](1, 0);
    const double b = sys.Q(1, 0);
    A0 = ComplexMatrix::Identity(2, 2);
    A0(0, 0) = a2 - b * b;
  } else {
    A0 = ComplexMatrix::Identity(sys.n, sys.n);
  }

  const YongReport yong = yong_check(sys, A0, strong);
  const auto emit = [&os](const char* name, const YongConditionResult& c) {
    os << "yong_" << name << "," << (c.passed ? "pass" : "fail") << "," << fmt(c.margin) << ",\""
       << c.detail << "\"\n";
  };
  emit("i_fast_spectrum", yong.fast_spectrum);
  emit("ii_symmetrizer", yong.symmetrizer);
  emit("iii_coupling", yong.coupling);

  const Verdict verdict = is_stiffly_well_posed(sys, decomp, opt.grid, opt.t_max);
  os << "f0_scan," << verdict_name(verdict) << "\n";
  return verdict == Verdict::fail ? 1 : 0;
}

int run_kreiss(const CommonOptions& opt) {
  const RelaxationSystem sys = parse_system_spec(opt.system_spec);
  const BlockDecomposition decomp = block_decompose(sys, opt.tol);
  Output out(opt.out_path);
  std::ostream& os = out.stream();
  os << kCsvBanner << "\n";
  os << "matrix,xi,eta,kreiss,divergent,infinite\n";

  const auto emit = [&os](const std::string& label, double xi, double eta,
                          const KreissEstimate& est) {
    os << label << "," << fmt(xi) << "," << fmt(eta) << "," << fmt(est.value) << ","
       << (est.divergent ? "true" : "false") << "," << (est.infinite ? "true" : "false") << "\n";
  };

  emit("Q", 0.0, 1.0, kreiss_measure(decomp.transformed_Q));
  if (decomp.r > 0) emit("B", 0.0, 1.0, kreiss_measure(decomp.B));
  const int directions = std::max(3, std::min(opt.grid, 33));
  for (int k = 0; k < directions; ++k) {
    const double theta = 3.14159265358979323846 * k / (directions - 1);
    const double xi = std::cos(theta);
    const double eta = std::sin(theta);
    const SymbolBlocks blocks = symbol(sys, decomp, xi1(xi), eta);
    emit("H", xi, eta, kreiss_measure(blocks.H));
  }
  return 0;
}

int run_scan(const CommonOptions& opt) {
  const RelaxationSystem sys = parse_system_spec(opt.system_spec);
  const BlockDecomposition decomp = block_decompose(sys, opt.tol);
  Output out(opt.out_path);
  std::ostream& os = out.stream();
  os << kCsvBanner << "\n";
  os << "family";
  for (int j = 0; j < sys.d; ++j) os << ",xi" << j;
  os << ",eta,quasi_stable,sup_norm\n";

  bool all_ok = true;
  for (Family family : {Family::F0, Family::F1, Family::F2}) {
    const FamilyScanReport report = family_scan(sys, decomp, family, opt.grid, opt.t_max);
    if (!report.all_quasi_stable) all_ok = false;
    for (const auto& row : report.rows) {
      os << family_name(family);
      for (int j = 0; j < sys.d; ++j) os << "," << fmt(row.xi[j]);
      os << "," << fmt(row.eta) << "," << (row.quasi_stable ? "true" : "false") << ","
         << fmt(row.sup_norm) << "\n";
    }
  }
  return all_ok ? 0 : 1;
}

int run_verify_lemmas(const CommonOptions& opt) {
  Output out(opt.out_path);
  std::ostream& os = out.stream();
  os << kCsvBanner << "\n";
  bool all_ok = true;

  // Lemma 3.1 battery: closed-form agreement where defined, bounds always.
  {
    std::mt19937_64 g(opt.seed);
    int pass = 0;
    for (int i = 0; i < opt.samples; ++i) {
      IntegralQuery q;
      q.alpha1 = uniform(g, -100.0, 100.0);
      q.beta1 = std::pow(10.0, uniform(g, -3.0, 3.0));
      const int flavor = i % 3;
      if (flavor == 0) {
        q.alpha2 = uniform(g, -100.0, 100.0);
        q.beta2 = q.beta1;
      } else if (flavor == 1) {
        q.alpha2 = q.alpha1;
        q.beta2 = std::pow(10.0, uniform(g, -3.0, 3.0));
      } else {
        q.alpha2 = uniform(g, -100.0, 100.0);
        q.beta2 = std::pow(10.0, uniform(g, -3.0, 3.0));
      }
      bool ok = check_lemma_3_1(q).holds;
      if (const auto closed = integral_I_closed(q)) {
        ok = ok && std::abs(integral_I(q, 1e-10) - *closed) <= 1e-8 * *closed;
      }
      if (ok) ++pass;
    }
    os << "lemma3.1: " << pass << "/" << opt.samples << " pass\n";
    all_ok = all_ok && pass == opt.samples;
  }

  // Lemma 3.2: the rotation-block and scalar-decay cases over an eta sweep.
  {
    int pass = 0, total = 0;
    Eigen::MatrixXcd const_coeffs(2, 1);
    const_coeffs << Complex(1, 0), Complex(0, 0);
    ComplexMatrix rotation(2, 2);
    rotation << 0, 1, -1, 0;
    Eigen::MatrixXcd linear(1, 2);
    linear << Complex(0, 0), Complex(1, 0);
    ComplexMatrix decay(1, 1), drift(1, 1);
    decay(0, 0) = -1.0;
    drift(0, 0) = 0.3;
    for (double eta : {1e2, 1e3, 1e4, 1e5}) {
      GrlCase rot{rotation, ComplexMatrix::Zero(2, 2), SmoothFunction::polynomial(const_coeffs),
                  1.0, eta};
      GrlCase diag{decay, drift, SmoothFunction::polynomial(linear), 2.0, eta};
      for (const GrlCase& kase : {rot, diag}) {
        ++total;
        if (grl_check(kase).holds) ++pass;
      }
    }
    os << "lemma3.2: " << pass << "/" << total << " pass\n";
    all_ok = all_ok && pass == total;
  }

  // Lemma 3.3: coupling-kernel bounds on the built-in systems.
  {
    int pass = 0, total = 0;
    for (const RelaxationSystem& sys : {osc3_system(), jinxin_system(1.0, 0.5)}) {
      const BlockDecomposition decomp = block_decompose(sys);
      const GBoundConstants constants =
          instantiate_g_bound_constants(sys, decomp, opt.beta_tilde);
      for (double eta : {1e2, 1e3, 1e4}) {
        for (int xi = 1; xi <= 3; ++xi) {
          ++total;
          if (g_bound_check(sys, decomp, opt.t, xi1(xi), eta, constants).holds) ++pass;
        }
      }
    }
    os << "lemma3.3: " << pass << "/" << total << " pass\n";
    all_ok = all_ok && pass == total;
  }

  return all_ok ? 0 : 1;
}

void emit_record_header(std::ostream& os) {
  os << "epsilon,t,l2_error,low_freq_error,high_freq_error,rate_ratio,h2_norm\n";
}

void emit_record(std::ostream& os, const ConvergenceRecord& rec) {
  os << fmt(rec.epsilon) << "," << fmt(rec.t) << "," << fmt(rec.l2_error) << ","
     << fmt(rec.low_freq_error) << "," << fmt(rec.high_freq_error) << "," << fmt(rec.rate_ratio)
     << "," << fmt(rec.h2_norm_u0) << "\n";
}

int run_solve(const CommonOptions& opt) {
  const RelaxationSystem sys = parse_system_spec(opt.system_spec);
  const BlockDecomposition decomp = block_decompose(sys, opt.tol);
  const std::vector<double> eps = parse_eps_list(opt.eps_text);
  const FourierField U0 =
      make_initial_data({sys.d, sys.n, opt.cutoff, 2.0, opt.seed});
  Output out(opt.out_path);
  std::ostream& os = out.stream();
  os << kCsvBanner << "\n";
  emit_record_header(os);
  emit_record(os, slow_error(sys, decomp, U0, opt.t, eps.front(), opt.beta_tilde));
  return 0;
}

int run_converge(const CommonOptions& opt) {
  const RelaxationSystem sys = parse_system_spec(opt.system_spec);
  const BlockDecomposition decomp = block_decompose(sys, opt.tol);
  const std::vector<double> eps = parse_eps_list(opt.eps_text);
  const FourierField U0 =
      make_initial_data({sys.d, sys.n, opt.cutoff, 2.0, opt.seed});
  const ConvergenceStudy study =
      convergence_study(sys, decomp, U0, opt.t, eps, opt.beta_tilde);

  Output out(opt.out_path);
  std::ostream& os = out.stream();
  os << kCsvBanner << "\n";
  emit_record_header(os);
  for (const auto& rec : study.records) emit_record(os, rec);
  os << "# ratio_max," << fmt(study.ratio_max) << ",ratio_min," << fmt(study.ratio_min)
     << ",monotone," << (study.errors_strictly_decreasing ? "true" : "false") << "\n";
  return study.errors_strictly_decreasing ? 0 : 1;
}

int run_kernel(const CommonOptions& opt) {
  const RelaxationSystem sys = parse_system_spec(opt.system_spec);
  const BlockDecomposition decomp = block_decompose(sys, opt.tol);
  const std::vector<double> eps = parse_eps_list(opt.eps_text);
  const GBoundConstants constants = instantiate_g_bound_constants(sys, decomp, opt.beta_tilde);

  Output out(opt.out_path);
  std::ostream& os = out.stream();
  os << kCsvBanner << "\n";
  os << "t,xi,eta,g_norm,bound,holds\n";
  bool all_hold = true;
  const int xi_max = std::min(opt.cutoff, 5);
  for (double e : eps) {
    const double eta = 1.0 / e;
    for (int xi = 1; xi <= xi_max; ++xi) {
      const BoundCheckResult result =
          g_bound_check(sys, decomp, opt.t, xi1(xi), eta, constants);
      if (!result.holds) all_hold = false;
      os << fmt(opt.t) << "," << fmt(xi) << "," << fmt(eta) << "," << fmt(result.lhs) << ","
         << fmt(result.rhs) << "," << (result.holds ? "true" : "false") << "\n";
    }
  }
  return all_hold ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification toolkit for linear hyperbolic relaxation systems"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string a0_path;
  bool strong = false;

  const auto add_common = [&](CLI::App* cmd, bool needs_system) {
    if (needs_system) {
      cmd->add_option("system", opt.system_spec,
                      "built-in name (osc3, jinxin:a=1,b=0.5) or JSON file path")
          ->required();
    }
    cmd->add_option("--t", opt.t, "evaluation time");
    cmd->add_option("--tmax", opt.t_max, "semigroup scan horizon");
    cmd->add_option("--tol", opt.tol, "relative tolerance for spectral decisions");
    cmd->add_option("--grid", opt.grid, "direction-grid size for scans");
    cmd->add_option("--cutoff", opt.cutoff, "frequency cutoff N");
    cmd->add_option("--beta-tilde", opt.beta_tilde, "frequency-split constant in Xi(eta)");
    cmd->add_option("--seed", opt.seed, "seed for randomized batteries and initial data");
    cmd->add_option("--eps", opt.eps_text, "comma-separated epsilon list");
    cmd->add_option("--out", opt.out_path, "output CSV path (default stdout)");
  };

  CLI::App* check = app.add_subcommand("check", "quasi-stability and Yong certificate report");
  add_common(check, true);
  check->add_option("--a0", a0_path, "JSON file with the symmetrizer A0 (transformed frame)");
  check->add_flag("--strong", strong, "check Yong's second (strong coupling) condition");

  CLI::App* kreiss = app.add_subcommand("kreiss", "Kreiss measurement table for Q, B, H");
  add_common(kreiss, true);

  CLI::App* scan = app.add_subcommand("scan", "F0/F1/F2 family scans");
  add_common(scan, true);

  CLI::App* verify = app.add_subcommand("verify-lemmas", "integral/kernel bound batteries");
  add_common(verify, false);
  verify->add_option("--samples", opt.samples, "number of randomized integral queries");

  CLI::App* solve = app.add_subcommand("solve", "single-epsilon error record");
  add_common(solve, true);

  CLI::App* converge = app.add_subcommand("converge", "convergence study CSV");
  add_common(converge, true);

  CLI::App* kernel = app.add_subcommand("kernel", "coupling-kernel norm sweep");
  add_common(kernel, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(check)) return run_check(opt, a0_path, strong);
    if (app.got_subcommand(kreiss)) return run_kreiss(opt);
    if (app.got_subcommand(scan)) return run_scan(opt);
    if (app.got_subcommand(verify)) return run_verify_lemmas(opt);
    if (app.got_subcommand(solve)) return run_solve(opt);
    if (app.got_subcommand(converge)) return run_converge(opt);
    if (app.got_subcommand(kernel)) return run_kernel(opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
