#include <benchmark/benchmark.h>

#include "petmpc/scenario.hpp"

using namespace petmpc;

namespace {

const ScenarioConfig& cfg() {
  static ScenarioConfig c = builtin_config("identification");
  return c;
}

const TubeIngredients& ingredients() {
  static TubeIngredients ing = build_ingredients(cfg());
  return ing;
}

void BM_LpSolve(benchmark::State& state) {
  const Polytope& S = ingredients().S;
  Vector a(2);
  a << 1.0, 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(S.support(a));
}
BENCHMARK(BM_LpSolve);

void BM_MinkowskiSum(benchmark::State& state) {
  const Polytope& A = ingredients().W_hat;
  const Polytope& B = ingredients().W_S;
  for (auto _ : state) benchmark::DoNotOptimize(A.minkowski_sum(B));
}
BENCHMARK(BM_MinkowskiSum);

void BM_Mrpi(benchmark::State& state) {
  const auto& c = cfg();
  const Matrix A_K = c.model.A_nom + c.model.B_nom * c.K_t;
  const Polytope W_total = c.W.linear_map(c.model.B_nom).minkowski_sum(ingredients().W_S);
  for (auto _ : state) benchmark::DoNotOptimize(compute_mrpi(A_K, W_total));
}
BENCHMARK(BM_Mrpi);

void BM_NominalQp(benchmark::State& state) {
  const auto& c = cfg();
  MpcConfig mpc{c.N, c.Q, c.R, ingredients(), c.pe, c.grid_density, c.qp_tol};
  Vector z0(2);
  z0 << 4.0, -3.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_nominal_qp(mpc, c.model.A_nom, c.model.B_nom, z0));
}
BENCHMARK(BM_NominalQp);

void BM_SelectW0(benchmark::State& state) {
  const auto& c = cfg();
  PeBuffer buf = init_buffer(c.W, c.pe, c.seed);
  for (auto _ : state) benchmark::DoNotOptimize(select_w0(buf, c.W, c.R, c.grid_density));
}
BENCHMARK(BM_SelectW0);

void BM_SimulatorStep(benchmark::State& state) {
  for (auto _ : state) {
    state.PauseTiming();
    Simulator sim(make_setup(cfg(), ingredients()));
    state.ResumeTiming();
    benchmark::DoNotOptimize(sim.step());
  }
}
BENCHMARK(BM_SimulatorStep);

}  // namespace

BENCHMARK_MAIN();
