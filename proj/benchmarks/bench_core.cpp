#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "lagstokes/analysis.hpp"
#include "lagstokes/eulerian.hpp"
#include "lagstokes/flow.hpp"
#include "lagstokes/lagrangian.hpp"

using namespace lagstokes;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField bumpy(const TorusGrid& g) {
  return ScalarField::from_function(g, [](const Point& x) {
    return 1.0 + 0.4 * std::cos(2 * kPi * x[0]) * std::cos(2 * kPi * x[1]) + 0.1 * std::sin(6 * kPi * x[0]);
  });
}

}  // namespace

static void BM_Poisson(benchmark::State& state) {
  const TorusGrid g(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const auto rhs = bumpy(g);
  for (auto _ : state) {
    auto sol = solve_poisson_periodic(rhs);
    benchmark::DoNotOptimize(gradient_spectral(sol.phi));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}
BENCHMARK(BM_Poisson)->Args({1, 4096})->Args({2, 64})->Args({2, 256});

static void BM_IntegrateFlow(benchmark::State& state) {
  const TorusGrid g(2, static_cast<int>(state.range(0)));
  VelocityHistory u;
  for (int k = 0; k <= 10; ++k) {
    u.times.push_back(0.05 * k);
    u.fields.push_back(gradient_spectral(solve_poisson_periodic(bumpy(g)).phi));
  }
  for (auto _ : state) benchmark::DoNotOptimize(integrate_flow(u, 0.01));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}
BENCHMARK(BM_IntegrateFlow)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_LagrangianWindow(benchmark::State& state) {
  const TorusGrid g(2, static_cast<int>(state.range(0)));
  const auto law = gamma_law(1.4);
  const auto s = initial_state(bumpy(g), law);
  LagrangianRunConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(step_window(s, law, cfg, 0.05, 1e6));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}
BENCHMARK(BM_LagrangianWindow)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_BmoSeminorm(benchmark::State& state) {
  const TorusGrid g(2, static_cast<int>(state.range(0)));
  const auto f = bumpy(g);
  const int level = static_cast<int>(std::log2(g.n())) - 1;
  for (auto _ : state) benchmark::DoNotOptimize(bmo_seminorm(f, level));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}
BENCHMARK(BM_BmoSeminorm)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
