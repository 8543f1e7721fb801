#include <benchmark/benchmark.h>

#include <random>

#include "relaxlab/bounds.hpp"
#include "relaxlab/linalg.hpp"
#include "relaxlab/spectral.hpp"
#include "relaxlab/stability.hpp"

using namespace relaxlab;

namespace {

ComplexMatrix random_matrix(int n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  ComplexMatrix M(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      M(i, j) = Complex(static_cast<double>(g() >> 11) * 0x1.0p-53 - 0.5,
                        static_cast<double>(g() >> 11) * 0x1.0p-53 - 0.5);
    }
  }
  return M;
}

Eigen::VectorXd xi1(double value) {
  Eigen::VectorXd xi(1);
  xi << value;
  return xi;
}

void BM_MatExp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ComplexMatrix M = random_matrix(n, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mat_exp(M, 1.0));
  }
}
BENCHMARK(BM_MatExp)->Arg(2)->Arg(4)->Arg(8)->Arg(16)->Arg(64);

void BM_Spectrum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ComplexMatrix M = random_matrix(n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectrum(M));
  }
}
BENCHMARK(BM_Spectrum)->Arg(4)->Arg(16)->Arg(64);

void BM_KreissMeasure(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ComplexMatrix M = random_matrix(n, 3);
  M -= 3.0 * ComplexMatrix::Identity(n, n);  // push the spectrum left
  for (auto _ : state) {
    benchmark::DoNotOptimize(kreiss_measure(M));
  }
}
BENCHMARK(BM_KreissMeasure)->Arg(2)->Arg(4)->Arg(6);

void BM_CouplingKernel(benchmark::State& state) {
  const RelaxationSystem sys = osc3_system();
  const BlockDecomposition decomp = block_decompose(sys);
  const double eta = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(coupling_kernel(sys, decomp, 1.0, xi1(2.0), eta));
  }
}
BENCHMARK(BM_CouplingKernel)->Arg(10)->Arg(1000)->Arg(100000);

void BM_FullSolve(benchmark::State& state) {
  const RelaxationSystem sys = osc3_system();
  const BlockDecomposition decomp = block_decompose(sys);
  const FourierField U0 = make_initial_data({1, 3, static_cast<int>(state.range(0)), 2.0, 4});
  for (auto _ : state) {
    benchmark::DoNotOptimize(full_solve(sys, decomp, U0, 1.0, 1e3));
  }
}
BENCHMARK(BM_FullSolve)->Arg(16)->Arg(64)->Arg(256);

void BM_IntegralI(benchmark::State& state) {
  const IntegralQuery q{3.0, -2.0, 0.05, 8.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(integral_I(q, 1e-10));
  }
}
BENCHMARK(BM_IntegralI);

}  // namespace

BENCHMARK_MAIN();
