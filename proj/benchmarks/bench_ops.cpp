#include <benchmark/benchmark.h>

#include "giraf/analysis.hpp"
#include "giraf/baselines.hpp"

using namespace giraf;

namespace {

struct Problem
{
  LiftingConfig cfg;
  KSpaceArray x;
  VecX h;
};

/// Phantom coefficients on an n x n grid with an f x f gradient-weighted lifting.
Problem make_problem(int n, int f)
{
  CounterRng rng(1);
  auto const gamma = IndexSet2D::rect(n, n);
  Problem p{LiftingConfig::make(gamma, IndexSet2D::rect(f, f), {WeightingKind::gradient}),
            phantom_fourier({random_edge(IndexSet2D::rect(3, 3), rng), 1.0, 0.25, 4}, gamma), {}};
  p.h = VecX(p.cfg.cols());
  for (auto &v : p.h) {
    v = rng.complex_normal();
  }
  return p;
}

void BM_LiftApply(benchmark::State &state)
{
  auto const p = make_problem(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  LiftingOperator const op(p.cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(op.apply(p.x, p.h));
  }
}
BENCHMARK(BM_LiftApply)->Args({64, 15})->Args({128, 15})->Args({256, 15})->Unit(benchmark::kMillisecond);

void BM_Gram(benchmark::State &state)
{
  auto const p = make_problem(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  LiftingOperator const op(p.cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(op.gram(p.x));
  }
}
BENCHMARK(BM_Gram)->Args({64, 15})->Args({128, 15})->Args({256, 15})->Unit(benchmark::kMillisecond);

// Filter update: eigen-decomposition plus the sum-of-squares mask.
void BM_WeightUpdate(benchmark::State &state)
{
  auto const p = make_problem(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  MatX const G = LiftingOperator(p.cfg).gram(p.x);
  for (auto _ : state) {
    benchmark::DoNotOptimize(weight_update(G, 1e-3 * G.diagonal().real().maxCoeff(), 0.0, p.cfg.lambda1,
                                           p.cfg.fft_grid));
  }
}
BENCHMARK(BM_WeightUpdate)->Args({64, 15})->Args({128, 15})->Args({256, 15})->Unit(benchmark::kMillisecond);

void BM_ApproxNormal(benchmark::State &state)
{
  auto const p = make_problem(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  LiftingOperator const op(p.cfg);
  MatX const G = op.gram(p.x);
  auto const wu = weight_update(G, 1e-3 * G.diagonal().real().maxCoeff(), 0.0, p.cfg.lambda1, p.cfg.fft_grid);
  ApproxNormal const q(op, wu.mask);
  for (auto _ : state) {
    benchmark::DoNotOptimize(q.regularizer(p.x.values()));
  }
}
BENCHMARK(BM_ApproxNormal)->Args({64, 15})->Args({128, 15})->Args({256, 15})->Unit(benchmark::kMillisecond);

void BM_ExactNormal(benchmark::State &state)
{
  auto const p = make_problem(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  LiftingOperator const op(p.cfg);
  MatX const G = op.gram(p.x);
  auto const wu = weight_update(G, 1e-3 * G.diagonal().real().maxCoeff(), 0.0, p.cfg.lambda1, p.cfg.fft_grid);
  ExactNormal const q(op, wu.filters());
  for (auto _ : state) {
    benchmark::DoNotOptimize(q.regularizer(p.x.values()));
  }
}
BENCHMARK(BM_ExactNormal)->Args({64, 7})->Args({64, 15})->Args({128, 15})->Unit(benchmark::kMillisecond);

// The per-iteration cost SVT pays on the dense lifted matrix.
void BM_LiftedSvd(benchmark::State &state)
{
  auto const p = make_problem(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  MatX const T = lift_dense(p.x, p.cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(singular_values(T));
  }
}
BENCHMARK(BM_LiftedSvd)->Args({32, 15})->Args({64, 15})->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
