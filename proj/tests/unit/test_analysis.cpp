#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "lagstokes/analysis.hpp"

using namespace lagstokes;
using lagstokes::testing::for_cases;
using lagstokes::testing::Gen;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField two_value(const TorusGrid& g) {
  return ScalarField::from_function(g, [](const Point& x) { return x[0] < 0.5 ? 0.5 : 1.5; });
}

ScalarField indicator(const TorusGrid& g) {
  return ScalarField::from_function(g, [](const Point& x) { return x[0] < 0.5 ? 1.0 : 0.0; });
}

ScalarField periodic_log(const TorusGrid& g) {
  const double floor = 0.5 * g.spacing();
  return ScalarField::from_function(g, [&](const Point& x) { return std::log(std::max(std::abs(x[0] - 0.5), floor)); });
}

ScalarHistory sigma_of(const LagrangianResult& run) {
  ScalarHistory h;
  for (const auto& s : run.states) {
    h.times.push_back(s.time);
    h.fields.push_back(s.sigma);
  }
  return h;
}

ScalarField shift(const ScalarField& f, int cells) {
  const auto& g = f.grid();
  const int n = g.n();
  std::vector<double> v(g.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < (g.dim() == 2 ? n : 1); ++j) {
      v[g.index((i + cells) % n, g.dim() == 2 ? (j + cells) % n : 0)] = f[g.index(i, j)];
    }
  }
  return ScalarField(g, std::move(v));
}

}  // namespace

TEST(Energy, Examples) {
  const TorusGrid g(1, 16);
  auto law = linear_law();
  law.c1 = 0.0;
  law.c2 = 0.0;
  EXPECT_NEAR(energy(ScalarField::constant(g, law.rho_bar), law), 0.0, 1e-15);
  law.c1 = 1.0;
  EXPECT_NEAR(energy(ScalarField::constant(g, std::numbers::e), law), 2 * std::numbers::e, 1e-10);
  EXPECT_NEAR(energy(ScalarField::constant(g, std::numbers::e), law, 2.0), 4 * std::numbers::e, 1e-10);
}

TEST(Energy, LabelAndSpatialFormsAgreeAtStart) {
  const TorusGrid g(1, 64);
  const auto rho0 = two_value(g);
  const auto law = gamma_law(1.4);
  EXPECT_NEAR(energy(initial_state(rho0, law), law), energy(rho0, law), 1e-14);
}

TEST(Energy, DecaysOnTwoValueRun) {
  const TorusGrid g(1, 256);
  const auto law = linear_law();
  const auto run = run_lagrangian(two_value(g), law, LagrangianRunConfig{});
  EXPECT_LT(energy(run.states.back(), law), energy(run.states.front(), law));
}

TEST(EnergyBalance, ConstantAndZeroStates) {
  const TorusGrid g(1, 32);
  LagrangianRunConfig cfg;
  cfg.final_time = 0.5;
  for (double c : {1.0, 0.0}) {
    const auto law = gamma_law(1.4);
    const auto run = run_lagrangian(ScalarField::constant(g, c), law, cfg);
    const auto report = energy_balance_report(run, law);
    ASSERT_FALSE(report.entries.empty());
    for (double e : report.entries) EXPECT_EQ(e, 0.0);
    EXPECT_TRUE(report.ok);
  }
}

TEST(EnergyBalance, TwoValueRunAtTwoWindowLengths) {
  const TorusGrid g(1, 256);
  const auto law = linear_law();
  for (double tau : {0.05, 0.025}) {
    LagrangianRunConfig cfg;
    cfg.window = tau;
    const auto run = run_lagrangian(two_value(g), law, cfg);
    const auto report = energy_balance_report(run, law);
    EXPECT_NEAR(report.tolerance, 1e-6 * (1 + report.energy.front()), 1e-18);
    for (double e : report.entries) EXPECT_LE(e, report.tolerance) << "tau " << tau;
    EXPECT_TRUE(report.ok);
    EXPECT_GT(report.total_dissipation, 0.0);
  }
}

TEST(Bmo, ConstantIsZero) {
  for (int d : {1, 2}) {
    const TorusGrid g(d, 32);
    const auto report = bmo_seminorm(ScalarField::constant(g, 3.7), 4);
    EXPECT_EQ(report.seminorm, 0.0);
    EXPECT_THROW(john_nirenberg_check(report), Error);
  }
  EXPECT_EQ(bmo_bruteforce_1d(ScalarField::constant(TorusGrid(1, 32), -2.0)), 0.0);
}

TEST(Bmo, IndicatorAgainstBruteForce) {
  const TorusGrid g(1, 256);
  const auto f = indicator(g);
  const double brute = bmo_bruteforce_1d(f);
  EXPECT_NEAR(brute, 0.5, 1e-3);
  const auto report = bmo_seminorm(f, 7);
  EXPECT_NEAR(report.seminorm, brute, 1e-3);
  EXPECT_FALSE(report.note.empty());
}

TEST(Bmo, BruteForceOnSmallExample) {
  // Values 0,0,0,1 on 8 cells repeated: best interval straddles one jump evenly.
  const TorusGrid g(1, 8);
  const ScalarField f(g, {0, 0, 0, 0, 1, 1, 1, 1});
  EXPECT_NEAR(bmo_bruteforce_1d(f), 0.5, 1e-15);
}

TEST(Bmo, RejectsTooDeepLevel) {
  const TorusGrid g(1, 16);
  EXPECT_THROW(bmo_seminorm(indicator(g), 4), Error);
  EXPECT_NO_THROW(bmo_seminorm(indicator(g), 3));
}

TEST(Bmo, HomogeneityConstantsAndTranslation) {
  for_cases(12, 61, [](Gen& gen, int) {
    const TorusGrid g(gen.integer(1, 2), 32);
    const auto f = gen.field(g, -1.0, 1.0);
    const int level = 4;
    const double base = bmo_seminorm(f, level).seminorm;
    const double a = gen.uniform(-3.0, 3.0);
    const auto scaled = linear_combination(a, f, 0.0, f);
    ASSERT_NEAR(bmo_seminorm(scaled, level).seminorm, std::abs(a) * base, 1e-12 * (1 + base));
    const auto lifted = linear_combination(1.0, f, 1.0, ScalarField::constant(g, gen.uniform(-5, 5)));
    ASSERT_NEAR(bmo_seminorm(lifted, level).seminorm, base, 1e-12);
    const int quarter = g.n() / 4;
    ASSERT_NEAR(bmo_seminorm(shift(f, quarter * gen.integer(1, 3)), level).seminorm, base, 1e-12);
  });
}

TEST(JohnNirenberg, IndicatorPasses) {
  const TorusGrid g(1, 256);
  const auto report = bmo_seminorm(indicator(g), 7);
  const auto fit = john_nirenberg_check(report);
  EXPECT_EQ(fit.verdict, Verdict::Pass);
  EXPECT_GT(fit.c2, 0.0);
  EXPECT_TRUE(std::isfinite(fit.exp_integral));
  // The tail is empty past lambda = 1.
  for (const auto& [lambda, frac] : report.jn_curve) {
    if (lambda >= 1.0) {
      EXPECT_EQ(frac, 0.0);
    }
  }
}

TEST(JohnNirenberg, PeriodicLogPasses) {
  const TorusGrid g(1, 1024);
  const auto report = bmo_seminorm(periodic_log(g), 9);
  EXPECT_GT(report.seminorm, 0.0);
  const auto fit = john_nirenberg_check(report);
  EXPECT_EQ(fit.verdict, Verdict::Pass);
  EXPECT_TRUE(std::isfinite(fit.exp_integral));
  EXPECT_GT(fit.c2, 0.0);
}

TEST(LogInequality, RatioIsFiniteAndPositive) {
  const TorusGrid g(1, 256);
  const auto f = periodic_log(g);
  const double semi = bmo_seminorm(f, 7).seminorm;
  const auto g2 = ScalarField::from_function(g, [](const Point& x) { return std::cos(2 * kPi * x[0]); });
  const double ratio = log_inequality_ratio(f, semi, g2, 4.0);
  EXPECT_TRUE(std::isfinite(ratio));
  EXPECT_GT(ratio, 0.0);
}

TEST(Uniqueness, IdenticalPaths) {
  const TorusGrid g(1, 64);
  LagrangianRunConfig cfg;
  cfg.final_time = 0.3;
  const auto run = run_lagrangian(two_value(g), linear_law(), cfg);
  const auto rec = delta_continuation(sigma_of(run), {0.1}, EulerianConfig{});
  const auto series = compare_paths(rec.u, rec.u, {0.0, 0.25, 0.5, 0.75, 1.0}, 0.01);
  for (double v : series.u_l2_gap) EXPECT_EQ(v, 0.0);
  for (double v : series.alpha) EXPECT_EQ(v, 0.0);
}

TEST(Uniqueness, ZeroSigma) {
  const TorusGrid g(1, 64);
  ScalarHistory sigma;
  sigma.times = {0.0, 0.1, 0.2};
  for (int k = 0; k < 3; ++k) sigma.fields.push_back(ScalarField::constant(g, 0.0));
  UniquenessConfig cfg;
  cfg.ladder_a = {0.2, 0.1};
  cfg.ladder_b = {0.2, 0.1, 0.05};
  const auto report = uniqueness_experiment(sigma, cfg);
  EXPECT_EQ(report.base.sup_gap, 0.0);
  EXPECT_EQ(report.refined.sup_gap, 0.0);
  EXPECT_EQ(report.base.alpha.front(), 0.0);
  EXPECT_EQ(report.verdict, Verdict::Inconclusive);
}

TEST(Uniqueness, AlphaStartsAtZero) {
  const TorusGrid g(1, 128);
  LagrangianRunConfig cfg;
  cfg.final_time = 0.3;
  const auto run = run_lagrangian(two_value(g), linear_law(), cfg);
  UniquenessConfig uc;
  uc.ladder_a = {0.1, 0.05};
  uc.ladder_b = {0.1};
  const auto report = uniqueness_experiment(sigma_of(run), uc);
  EXPECT_EQ(report.base.alpha.front(), 0.0);
  EXPECT_EQ(report.refined.alpha.front(), 0.0);
  EXPECT_GT(report.base.sup_gap, 0.0);
}

TEST(Energy, LabelAndSpatialFormsAgreeAfterReconstruction) {
  const TorusGrid g(1, 256);
  const auto rho0 = ScalarField::from_function(g, [](const Point& x) { return 1.0 + 0.3 * std::cos(2 * kPi * x[0]); });
  const auto law = gamma_law(1.4);
  LagrangianRunConfig cfg;
  cfg.final_time = 0.5;
  const auto run = run_lagrangian(rho0, law, cfg);
  const auto rec = delta_continuation(sigma_of(run), {0.05, 0.025, 0.0125}, EulerianConfig{});
  ASSERT_TRUE(rec.report.completed);
  // Eulerian density rho(t, x) = eta(t, y(t, x)).
  for (std::size_t k = 0; k < run.states.size(); k += 5) {
    const auto& st = run.states[k];
    const auto y = inverse_flow(rec.u, st.time, 0.01);
    std::vector<double> rho(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) rho[i] = interpolate(st.eta, y[i]);
    EXPECT_NEAR(energy(ScalarField(g, rho), law), energy(st, law), 1e-3) << "t=" << st.time;
  }
}
