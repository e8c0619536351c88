#include <benchmark/benchmark.h>

#include <random>

#include "rte/measurement.hpp"
#include "rte/sigma_recovery.hpp"

namespace {

rte::Transport make_transport(int nx, int nv) {
  rte::PhantomSpec ps;
  ps.kind = "smooth-bump";
  return rte::Transport(rte::Phantom(ps).build(rte::Grid::square(nx, nv)));
}

void BM_ApplyInverse(benchmark::State& state) {
  const int nx = static_cast<int>(state.range(0));
  const rte::Transport t = make_transport(nx, 32);
  const rte::PhaseField g(t.grid(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(t.apply_inverse(g));
  state.SetComplexityN(static_cast<long>(t.grid().phase_size()));
}
BENCHMARK(BM_ApplyInverse)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ApplyScattering(benchmark::State& state) {
  const rte::Transport t = make_transport(32, static_cast<int>(state.range(0)));
  const rte::PhaseField f(t.grid(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(t.apply_scattering(f));
}
BENCHMARK(BM_ApplyScattering)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ForwardSolve(benchmark::State& state) {
  const rte::Transport t = make_transport(static_cast<int>(state.range(0)), 16);
  const int a = rte::find_anchor(t.inflow(), {0.0, 0.5}, 0);
  const rte::BoundaryField fm = rte::make_source(t.grid(), t.inflow(), {a, 0.25, false});
  for (auto _ : state) benchmark::DoNotOptimize(rte::solve_forward(t, fm));
}
BENCHMARK(BM_ForwardSolve)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Tikhonov(benchmark::State& state) {
  const int rows = static_cast<int>(state.range(0)), cols = static_cast<int>(state.range(1));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  Eigen::MatrixXd R(rows, cols);
  Eigen::VectorXd a(rows);
  for (int i = 0; i < rows; ++i) {
    a(i) = n(rng);
    for (int j = 0; j < cols; ++j) R(i, j) = n(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(rte::tikhonov_solve(R, a, 1e-3));
}
BENCHMARK(BM_Tikhonov)->Args({90, 81})->Args({90, 289})->Args({400, 81});

}  // namespace
BENCHMARK_MAIN();
