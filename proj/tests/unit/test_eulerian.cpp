#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "lagstokes/eulerian.hpp"
#include "lagstokes/lagrangian.hpp"
#include "lagstokes/spectral.hpp"

using namespace lagstokes;
using lagstokes::testing::for_cases;
using lagstokes::testing::Gen;

namespace {

constexpr double kPi = std::numbers::pi;

double sup_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double sup_diff(const ScalarField& a, const ScalarField& b) { return sup_diff(a.values(), b.values()); }

ScalarHistory sigma_of(const LagrangianResult& run) {
  ScalarHistory h;
  for (const auto& s : run.states) {
    h.times.push_back(s.time);
    h.fields.push_back(s.sigma);
  }
  return h;
}

ScalarHistory constant_history(const TorusGrid& g, const std::vector<double>& times, double value) {
  ScalarHistory h;
  h.times = times;
  for (std::size_t k = 0; k < times.size(); ++k) h.fields.push_back(ScalarField::constant(g, value));
  return h;
}

const LagrangianResult& two_value_run() {
  static const LagrangianResult run = [] {
    const TorusGrid g(1, 256);
    const auto rho0 = ScalarField::from_function(g, [](const Point& x) { return x[0] < 0.5 ? 0.5 : 1.5; });
    return run_lagrangian(rho0, linear_law(), LagrangianRunConfig{});
  }();
  return run;
}

double velocity_gap(const VelocityHistory& a, const VelocityHistory& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (int c = 0; c < a.grid().dim(); ++c) m = std::max(m, sup_diff(a.fields[k].component(c), b.fields[k].component(c)));
  }
  return m;
}

}  // namespace

TEST(Mollify, ConstantUnchanged) {
  const TorusGrid g(2, 32);
  const auto f = mollify(ScalarField::constant(g, 2.5), MollifierSpec{0.1});
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(f[i], 2.5, 1e-14);
}

TEST(Mollify, GaussianSymbolOnPureMode) {
  const TorusGrid g(1, 64);
  const double delta = 0.05;
  const auto f = ScalarField::from_function(g, [](const Point& x) { return std::sin(2 * kPi * x[0]); });
  const auto m = mollify(f, MollifierSpec{delta});
  const double factor = std::exp(-2 * kPi * kPi * delta * delta);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(m[i], factor * f[i], 1e-10);
}

TEST(Mollify, IndicatorKeepsBoundsAndMean) {
  const TorusGrid g(1, 256);
  const auto f = ScalarField::from_function(g, [](const Point& x) { return x[0] < 0.5 ? 1.0 : 0.0; });
  const auto m = mollify(f, MollifierSpec{0.05});
  EXPECT_LE(max_abs(m), 1.0);
  EXPECT_NEAR(mean(m), 0.5, 1e-12);
  EXPECT_GT(m[g.size() / 2], 0.0);
}

TEST(Mollify, SubGridWidthIsANoOpWithWarning) {
  const TorusGrid g(1, 64);
  Gen gen(51);
  const auto f = gen.field(g, -1.0, 1.0);
  Warnings w;
  const auto m = mollify(f, MollifierSpec{0.5 / 64}, &w);
  EXPECT_EQ(sup_diff(m, f), 0.0);
  EXPECT_EQ(w.size(), 1u);
  EXPECT_THROW(mollify(f, MollifierSpec{0.0}), Error);
}

TEST(Mollify, SupAndMeanProperty) {
  for_cases(30, 52, [](Gen& gen, int) {
    const TorusGrid g(gen.integer(1, 2), 64);
    const auto f = gen.field(g, -3.0, 3.0);
    const auto m = mollify(f, MollifierSpec{gen.uniform(0.04, 0.2)});
    ASSERT_LE(max_abs(m), max_abs(f));
    ASSERT_NEAR(mean(m), mean(f), 1e-12);
  });
}

TEST(Poisson, SingleModeOneDimension) {
  const TorusGrid g(1, 64);
  const auto rhs = ScalarField::from_function(g, [](const Point& x) { return std::cos(2 * kPi * x[0]); });
  const auto sol = solve_poisson_periodic(rhs);
  const auto phi = ScalarField::from_function(g, [](const Point& x) { return -std::cos(2 * kPi * x[0]) / (4 * kPi * kPi); });
  EXPECT_LT(sup_diff(sol.phi, phi), 1e-10);
  const auto u = gradient_spectral(sol.phi);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(u.at(i)[0], std::sin(2 * kPi * g.node(i)[0]) / (2 * kPi), 1e-10);
}

TEST(Poisson, ZeroRightHandSide) {
  const TorusGrid g(2, 16);
  const auto sol = solve_poisson_periodic(ScalarField::constant(g, 0.0));
  EXPECT_EQ(max_abs(sol.phi), 0.0);
  const auto shifted = solve_poisson_periodic(ScalarField::constant(g, 0.7));
  EXPECT_LT(max_abs(shifted.phi), 1e-15);
  EXPECT_NEAR(shifted.discarded_mean, 0.7, 1e-15);
}

TEST(Poisson, TwoDimensionalEigenfunction) {
  const TorusGrid g(2, 64);
  const auto rhs = ScalarField::from_function(g, [](const Point& x) { return std::sin(2 * kPi * x[0]) * std::sin(2 * kPi * x[1]); });
  const auto sol = solve_poisson_periodic(rhs);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(sol.phi[i], -rhs[i] / (8 * kPi * kPi), 1e-12);
}

TEST(Poisson, ResidualOnBandLimitedData) {
  for_cases(10, 53, [](Gen& gen, int) {
    const TorusGrid g(gen.integer(1, 2), 64);
    const auto rhs = linear_combination(1.0, gen.smooth_field(g, 8, 1.0), 1.0, ScalarField::constant(g, gen.uniform(-1, 1)));
    const auto sol = solve_poisson_periodic(rhs);
    const auto lap = laplacian_spectral(sol.phi);
    const double m = mean(rhs);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(lap[i] - (rhs[i] - m)));
    ASSERT_LE(err, 1e-10);
    ASSERT_NEAR(sol.discarded_mean, m, 1e-14);
    ASSERT_LE(std::abs(mean(sol.phi)), 1e-14);
  });
}

TEST(Gradient, Examples) {
  const TorusGrid g(2, 32);
  const auto zero = gradient_spectral(ScalarField::constant(g, 4.0));
  for (int c = 0; c < 2; ++c) {
    for (double v : zero.component(c)) EXPECT_LT(std::abs(v), 1e-13);
  }
  for_cases(10, 54, [](Gen& gen, int) {
    const TorusGrid g2(2, 32);
    const auto u = gradient_spectral(gen.field(g2, -1.0, 1.0));
    for (int c = 0; c < 2; ++c) ASSERT_LE(std::abs(mean(u.component_field(c))), 1e-12);
    ASSERT_LE(max_abs(curl_spectral(u)), 1e-10);
  });
}

TEST(Gradient, SupAndProbeBound) {
  const TorusGrid g(1, 128);
  const auto f = ScalarField::from_function(g, [](const Point& x) { return std::sin(2 * kPi * x[0]); });
  EXPECT_NEAR(gradient_sup(f), 2 * kPi, 1e-6);
  EXPECT_NEAR(poisson_gradient_bound(g), 1.0 / (2 * kPi), 1e-6);
}

TEST(PhiMap, ZeroAndConstantSigma) {
  const TorusGrid g(2, 16);
  const std::vector<double> times = {0.0, 0.05, 0.1};
  for (double c : {0.0, 1.3}) {
    const auto sigma = constant_history(g, times, c);
    VelocityHistory ubar;
    ubar.times = times;
    for (std::size_t k = 0; k < times.size(); ++k) {
      ubar.fields.emplace_back(g, std::vector<std::vector<double>>{std::vector<double>(g.size(), 0.2),
                                                                   std::vector<double>(g.size(), -0.1)});
    }
    const auto u = phi_map(ubar, sigma, 0.01);
    for (const auto& f : u.fields) {
      for (int comp = 0; comp < 2; ++comp) {
        for (double v : f.component(comp)) ASSERT_LT(std::abs(v), 1e-14);
      }
    }
  }
}

TEST(PhiMap, InitialNodeFromCosine) {
  const TorusGrid g(1, 64);
  ScalarHistory sigma;
  sigma.times = {0.0, 0.1};
  for (int k = 0; k < 2; ++k) {
    sigma.fields.push_back(ScalarField::from_function(g, [](const Point& y) { return std::cos(2 * kPi * y[0]); }));
  }
  const auto u = phi_map(zero_velocity(sigma), sigma, 0.01);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(u.fields[0].component(0)[i], std::sin(2 * kPi * g.node(i)[0]) / (2 * kPi), 1e-12);
  }
}

TEST(FixedPoint, ZeroSigma) {
  const TorusGrid g(2, 16);
  const auto sigma = constant_history(g, {0.0, 0.1, 0.2}, 0.0);
  const auto fp = phi_fixed_point(sigma, contraction_window(sigma), EulerianConfig{});
  EXPECT_EQ(fp.iterations, 1);
  EXPECT_EQ(velocity_gap(fp.u, zero_velocity(sigma)), 0.0);
}

TEST(FixedPoint, ConstantDensityRunGivesZeroVelocity) {
  const TorusGrid g(1, 32);
  LagrangianRunConfig cfg;
  cfg.final_time = 0.3;
  const auto run = run_lagrangian(ScalarField::constant(g, 1.0), gamma_law(1.4), cfg);
  const auto sigma = sigma_of(run);
  const auto smooth = mollify(sigma, MollifierSpec{0.1});
  const auto fp = phi_fixed_point(smooth, contraction_window(smooth), EulerianConfig{});
  EXPECT_LT(velocity_gap(fp.u, zero_velocity(sigma)), 1e-12);
}

TEST(FixedPoint, GeometricResidualDecay) {
  const auto sigma = mollify(sigma_of(two_value_run()), MollifierSpec{0.05});
  EulerianConfig cfg;
  const auto fp = phi_fixed_point(sigma, contraction_window(sigma), cfg);
  ASSERT_FALSE(fp.windows.empty());
  for (const auto& w : fp.windows) {
    ASSERT_LE(w.residuals.back(), cfg.tol);
    for (std::size_t k = 2; k < w.residuals.size(); ++k) {
      if (w.residuals[k - 1] < 1e-13) break;  // round-off floor
      EXPECT_LT(w.residuals[k], 0.9 * w.residuals[k - 1]) << "window at " << w.t0 << " step " << k;
    }
  }
}

TEST(FixedPoint, ExhaustedIterationsThrow) {
  const auto sigma = mollify(sigma_of(two_value_run()), MollifierSpec{0.05});
  EulerianConfig cfg;
  cfg.max_iter = 1;
  EXPECT_THROW(phi_fixed_point(sigma, contraction_window(sigma), cfg), NoContractionError);
}

TEST(Residual, TrivialPair) {
  const TorusGrid g(1, 32);
  const auto sigma = constant_history(g, {0.0, 0.5, 1.0}, 0.0);
  EXPECT_EQ(reconstruction_residual(zero_velocity(sigma), sigma, 0.01), 0.0);
}

TEST(Residual, SelfConsistentPair) {
  const TorusGrid g(1, 256);
  VelocityHistory u;
  ScalarHistory div;
  for (int k = 0; k <= 100; ++k) {
    u.times.push_back(0.01 * k);
    div.times.push_back(0.01 * k);
    const auto phi = ScalarField::from_function(g, [](const Point& x) { return -std::cos(2 * kPi * x[0]) / (4 * kPi * kPi); });
    u.fields.push_back(gradient_spectral(phi));
  }
  const auto flow = integrate_flow(u, 1e-3);
  ScalarHistory sigma;
  sigma.times = u.times;
  for (std::size_t k = 0; k < u.size(); ++k) {
    std::vector<double> s(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) s[i] = std::cos(2 * kPi * flow.positions[k][i][0]);
    sigma.fields.emplace_back(g, std::move(s));
  }
  EXPECT_LT(reconstruction_residual(u, sigma, 1e-3), 1e-4);
}

TEST(Continuation, ZeroSigma) {
  const TorusGrid g(1, 64);
  const auto sigma = constant_history(g, {0.0, 0.1, 0.2}, 0.0);
  const auto rec = delta_continuation(sigma, {0.1, 0.05}, EulerianConfig{});
  EXPECT_TRUE(rec.report.completed);
  EXPECT_EQ(velocity_gap(rec.u, zero_velocity(sigma)), 0.0);
  for (double d : rec.report.flow_distances) EXPECT_EQ(d, 0.0);
}

TEST(Continuation, RejectsNonDecreasingLadder) {
  const TorusGrid g(1, 64);
  const auto sigma = constant_history(g, {0.0, 0.1}, 0.0);
  EXPECT_THROW(delta_continuation(sigma, {0.05, 0.1}, EulerianConfig{}), Error);
}

TEST(Continuation, TwoValueLadderTrends) {
  const auto sigma = sigma_of(two_value_run());
  const auto rec = delta_continuation(sigma, {0.1, 0.05, 0.025, 0.0125}, EulerianConfig{});
  ASSERT_TRUE(rec.report.completed) << rec.report.failure;
  const auto& lv = rec.report.levels;
  ASSERT_EQ(lv.size(), 4u);
  for (std::size_t i = 1; i < lv.size(); ++i) {
    EXPECT_LT(lv[i].reconstruction_residual, lv[i - 1].reconstruction_residual);
    EXPECT_LT(lv[i].limit_residual, lv[i - 1].limit_residual);
  }
  EXPECT_LE(lv.back().reconstruction_residual, 1e-2);
  ASSERT_EQ(rec.report.flow_distances.size(), 3u);
  for (std::size_t i = 1; i < rec.report.flow_distances.size(); ++i) {
    EXPECT_LT(rec.report.flow_distances[i], rec.report.flow_distances[i - 1]);
  }
  for (const auto& f : rec.u.fields) EXPECT_LE(std::abs(mean(f.component_field(0))), 1e-10);
}

TEST(Continuation, TwoDimensionalVelocityIsAGradient) {
  const TorusGrid g(2, 32);
  const auto rho0 = ScalarField::from_function(g, [](const Point& x) {
    return 1.0 + 0.3 * std::cos(2 * kPi * x[0]) * std::sin(2 * kPi * x[1]);
  });
  LagrangianRunConfig cfg;
  cfg.final_time = 0.2;
  const auto run = run_lagrangian(rho0, gamma_law(1.4), cfg);
  const auto rec = delta_continuation(sigma_of(run), {0.1, 0.05}, EulerianConfig{});
  ASSERT_TRUE(rec.report.completed);
  for (const auto& f : rec.u.fields) {
    EXPECT_LE(max_abs(curl_spectral(f)), 1e-10);
    for (int c = 0; c < 2; ++c) EXPECT_LE(std::abs(mean(f.component_field(c))), 1e-10);
  }
}

TEST(Continuation, ConsistencyClosure) {
  const auto sigma = mollify(sigma_of(two_value_run()), MollifierSpec{0.05});
  EulerianConfig cfg;
  const auto fp = phi_fixed_point(sigma, contraction_window(sigma), cfg);
  const double residual = reconstruction_residual(fp.u, sigma, cfg.dt);
  // Feed the trajectory divergence of u back in as sigma.
  const auto flow = integrate_flow(fp.u, cfg.dt);
  ScalarHistory closure;
  closure.times = fp.u.times;
  for (std::size_t k = 0; k < fp.u.size(); ++k) {
    const auto div = divergence_spectral(fp.u.fields[k]);
    std::vector<double> s(div.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = interpolate(div, flow.positions[k][i]);
    closure.fields.emplace_back(div.grid(), std::move(s));
  }
  const auto again = phi_fixed_point(closure, contraction_window(closure), cfg);
  double gap = 0.0;
  for (std::size_t k = 0; k < fp.u.size(); ++k) {
    const auto d = linear_combination(1.0, again.u.fields[k].component_field(0), -1.0, fp.u.fields[k].component_field(0));
    gap = std::max(gap, l2_norm(d));
  }
  EXPECT_LE(gap, 2.0 * residual) << "residual " << residual;
}
