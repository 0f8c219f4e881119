// Serial reference vs OpenMP kernels, plus one end-to-end prox solve.
// Run with OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "proxeig/builtins.hpp"
#include "proxeig/functional.hpp"
#include "proxeig/graph.hpp"
#include "proxeig/kernels.hpp"
#include "proxeig/prox.hpp"

namespace pk = proxeig::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

template <bool Serial>
void BM_Dot(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  const auto a = random_vector(n, 1), b = random_vector(n, 2);
  for (auto _ : state) {
    double d = Serial ? pk::serial::dot(a, b) : pk::dot(a, b);
    benchmark::DoNotOptimize(d);
  }
  state.SetBytesProcessed(std::int64_t(state.iterations()) * std::int64_t(2 * n * sizeof(double)));
}

template <bool Serial>
void BM_GridGradient(benchmark::State& state) {
  const auto side = std::size_t(state.range(0));
  const auto u = random_vector(side * side, 3);
  std::vector<double> out(2 * side * side);
  for (auto _ : state) {
    if (Serial) pk::serial::grid_gradient(u, side, side, out);
    else pk::grid_gradient(u, side, side, out);
    benchmark::ClobberMemory();
  }
}

template <bool Serial>
void BM_GridGradientAdjoint(benchmark::State& state) {
  const auto side = std::size_t(state.range(0));
  const auto p = random_vector(2 * side * side, 4);
  std::vector<double> out(side * side);
  for (auto _ : state) {
    if (Serial) pk::serial::grid_gradient_adjoint(p, side, side, out);
    else pk::grid_gradient_adjoint(p, side, side, out);
    benchmark::ClobberMemory();
  }
}

template <bool Serial>
void BM_DenseMatvec(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  const auto a = random_vector(n * n, 5), x = random_vector(n, 6);
  std::vector<double> out(n);
  for (auto _ : state) {
    if (Serial) pk::serial::dense_matvec(a, n, n, x, out);
    else pk::dense_matvec(a, n, n, x, out);
    benchmark::ClobberMemory();
  }
}

template <bool Serial>
void BM_PrimalStep(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  auto v = random_vector(n, 7);
  const auto dtq = random_vector(n, 8), u = random_vector(n, 9);
  std::vector<double> vbar(n);
  for (auto _ : state) {
    if (Serial) pk::serial::pdhg_primal_step(v, dtq, u, 0.3, {}, vbar);
    else pk::pdhg_primal_step(v, dtq, u, 0.3, {}, vbar);
    benchmark::ClobberMemory();
  }
}

void BM_ProxTv(benchmark::State& state) {
  const auto side = std::size_t(state.range(0));
  const proxeig::Functional J = proxeig::Functional::aniso_tv(side, side);
  const proxeig::Signal u = proxeig::noisy_disk(side, 0.1, 1);
  proxeig::ProxConfig cfg;
  cfg.warm_start = false;
  cfg.inner_solver = state.range(1) ? proxeig::InnerSolver::kPdhg : proxeig::InnerSolver::kDualGradient;
  proxeig::ProxSolver solver(J, cfg);
  int inner = 0;
  for (auto _ : state) {
    const auto r = solver.prox(u, 0.1);
    inner = r.inner_iters;
    benchmark::DoNotOptimize(r.v.data().data());
  }
  state.counters["inner_iters"] = inner;
}

}  // namespace

BENCHMARK(BM_Dot<true>)->Name("dot/serial")->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_Dot<false>)->Name("dot/omp")->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_GridGradient<true>)->Name("grid_gradient/serial")->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_GridGradient<false>)->Name("grid_gradient/omp")->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_GridGradientAdjoint<true>)->Name("grid_gradient_adjoint/serial")->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_GridGradientAdjoint<false>)->Name("grid_gradient_adjoint/omp")->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_DenseMatvec<true>)->Name("dense_matvec/serial")->Arg(64)->Arg(512)->Arg(2048);
BENCHMARK(BM_DenseMatvec<false>)->Name("dense_matvec/omp")->Arg(64)->Arg(512)->Arg(2048);
BENCHMARK(BM_PrimalStep<true>)->Name("primal_step/serial")->Arg(1 << 12)->Arg(1 << 20);
BENCHMARK(BM_PrimalStep<false>)->Name("primal_step/omp")->Arg(1 << 12)->Arg(1 << 20);
BENCHMARK(BM_ProxTv)->Name("prox_tv")->Args({64, 0})->Args({64, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
