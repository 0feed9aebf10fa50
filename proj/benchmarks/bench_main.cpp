#include <benchmark/benchmark.h>

#include <cmath>

#include "danilab/dirichlet.hpp"
#include "danilab/flow.hpp"
#include "danilab/lattice.hpp"
#include "danilab/random.hpp"
#include "danilab/stats.hpp"

namespace {

using namespace danilab;

LatticeBasis flow_lattice(int n, double t, std::uint64_t seed) {
  Matrix phi(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) phi(i, j) = counter_uniform(seed, static_cast<std::uint64_t>(i * n + j));
  return LatticeBasis::unchecked((a_diag(t, n) * u_embed(phi)).matrix());
}

void BM_ShortestSupnorm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LatticeBasis b = flow_lattice(n, 4.0, 3);
  for (auto _ : state) benchmark::DoNotOptimize(shortest_supnorm(b).length);
}
BENCHMARK(BM_ShortestSupnorm)->Arg(1)->Arg(2)->Arg(3)->Arg(4);

void BM_CountInBox(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LatticeBasis b = flow_lattice(n, 4.0, 5);
  const Vector w = Vector::Constant(2 * n, 0.9);
  for (auto _ : state) benchmark::DoNotOptimize(count_in_box(b, w));
}
BENCHMARK(BM_CountInBox)->Arg(1)->Arg(2)->Arg(3);

void BM_Solvable(benchmark::State& state) {
  const auto N = state.range(0);
  const DirichletQuery q(Matrix::Constant(1, 1, std::sqrt(2.0)), N, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(solvable(q).has_value());
}
BENCHMARK(BM_Solvable)->Arg(10)->Arg(100)->Arg(1000);

void BM_SiegelAverage(benchmark::State& state) {
  const MatrixPolyCurve line({Matrix::Zero(1, 1), Matrix::Identity(1, 1)}, 1, 2);
  const Sampler sampler{1, 1000};
  const Vector w = Vector::Constant(2, 0.9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        siegel_average(line, static_cast<double>(state.range(0)), w, LatticeBasis::identity(2), false, sampler).mean);
  }
}
BENCHMARK(BM_SiegelAverage)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
