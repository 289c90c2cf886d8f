#include <benchmark/benchmark.h>

#include "sit/equilibria.hpp"
#include "sit/solver.hpp"
#include "sit/waves.hpp"

using namespace sit;

namespace {

void BM_StepperStep(benchmark::State& state) {
  const auto p = ModelParams::reference(0.5);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = state.range(1) ? Grid::radial(90.0, n) : Grid::cartesian(-40.0, 40.0, n);
  const auto up = solve_equilibria(p).upper->state;
  SimState s(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = g.x[i] > 0.0 ? 1.0 : 0.0;
    s.E[i] = w * up.E;
    s.M[i] = w * up.M;
    s.F[i] = w * up.F;
  }
  const ReleaseSchedule rel = state.range(1) ? ReleaseSchedule{AnnulusRelease{1e3, 10.0, 12.0, 0.05}}
                                             : ReleaseSchedule{NoRelease{}};
  Stepper st(p, g, rel, 0.9 * admissible_dt(p, f_bound(p, up.F)));
  for (auto _ : state) {
    st.step(s);
    benchmark::DoNotOptimize(s.F.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_StepperStep)->Args({801, 0})->Args({1601, 0})->Args({901, 1})->Args({3601, 1});

void BM_SolveEquilibria(benchmark::State& state) {
  const auto p = ModelParams::reference(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(solve_equilibria(p));
}
BENCHMARK(BM_SolveEquilibria);

void BM_Thresholds(benchmark::State& state) {
  const auto p = ModelParams::reference(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(thresholds(p));
}
BENCHMARK(BM_Thresholds);

void BM_CostQuadrature(benchmark::State& state) {
  const CostSchedule s = AnnulusRelease{1.0, 1.0, 2.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(sterile_cost_quadrature(s, 1e4));
}
BENCHMARK(BM_CostQuadrature);

}  // namespace

BENCHMARK_MAIN();
