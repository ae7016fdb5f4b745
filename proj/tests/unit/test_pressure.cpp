#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "lagstokes/pressure.hpp"

using namespace lagstokes;
using lagstokes::testing::for_cases;
using lagstokes::testing::Gen;

namespace {

// Composite Simpson on [a, b], independent of the library quadrature.
template <class F>
double simpson(F f, double a, double b, int panels = 20000) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

double potential_oracle(const PressureLaw& law, double rho, double c) {
  const auto integrand = [&](double s) { return law.p(s) / (s * s); };
  return c * (rho * simpson(integrand, law.rho_bar, rho) + law.c1 * rho + law.c2);
}

PressureLaw bare(PressureLaw law) {
  law.c1 = 0.0;
  law.c2 = 0.0;
  return law;
}

}  // namespace

TEST(EvalP, Examples) {
  EXPECT_DOUBLE_EQ(pressure_at(gamma_law(2.0), 2.0), 4.0);
  EXPECT_NEAR(pressure_at(oscillatory_law(2.0), std::sqrt(std::numbers::pi)), 0.0, 1e-14);
  EXPECT_DOUBLE_EQ(pressure_at(linear_law(), 0.0), 0.0);
}

TEST(EvalP, RejectsNegativeDensity) {
  try {
    pressure_at(linear_law(), -1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
  }
  EXPECT_THROW(potential_at(linear_law(), -0.5), Error);
}

TEST(Potential, LinearLawAtE) {
  const auto law = bare(linear_law());
  EXPECT_NEAR(potential_at(law, std::numbers::e), std::numbers::e, 1e-10);
  EXPECT_NEAR(potential_oracle(law, std::numbers::e, 1.0), std::numbers::e, 1e-10);
}

TEST(Potential, EmptyIntegral) {
  for (const auto& name : builtin_pressure_names()) {
    PressureSpec spec;
    spec.name = name;
    spec.c1 = 0.7;
    spec.c2 = 0.3;
    const auto law = make_pressure_law(spec);
    EXPECT_NEAR(potential_at(law, law.rho_bar, 2.0), 2.0 * (0.7 * law.rho_bar + 0.3), 1e-13) << name;
  }
}

TEST(Potential, QuadraticLaw) {
  EXPECT_NEAR(potential_at(bare(gamma_law(2.0)), 2.0), 2.0, 1e-12);
}

TEST(Potential, SignedBelowReference) {
  // int_1^{0.5} ds/s = -ln 2
  const auto law = bare(linear_law());
  EXPECT_NEAR(potential_at(law, 0.5), -0.5 * std::log(2.0), 1e-10);
}

TEST(Potential, AgreesWithSimpsonOracle) {
  for (const auto& name : builtin_pressure_names()) {
    if (name == "bump") continue;  // compact bumps need the breakpoint split; checked below
    PressureSpec spec;
    spec.name = name;
    const auto law = make_pressure_law(spec);
    for (double rho : {0.3, 1.7, 4.0, 9.5}) {
      const double ref = potential_oracle(law, rho, 1.0);
      EXPECT_NEAR(potential_at(law, rho), ref, 1e-7 * (1.0 + std::abs(ref))) << name << " rho=" << rho;
    }
  }
}

TEST(Potential, BumpLawMatchesPiecewiseOracle) {
  const auto law = bump_law();
  // Integrate each bump separately so Simpson sees a smooth integrand.
  double integral = 0.0;
  for (int k = 1; k <= 5; ++k) {
    const double w = std::ldexp(1.0, -k);
    const double a = std::max(1.0, k - w);
    const double b = std::min(5.5, k + w);
    if (b > a) integral += simpson([&](double s) { return law.p(s) / (s * s); }, a, b);
  }
  const double rho = 5.5;
  EXPECT_NEAR(potential_at(law, rho), rho * integral + law.c1 * rho + law.c2, 1e-7);
}

TEST(Potential, ResolutionDoublingIsStable) {
  for (const auto& name : builtin_pressure_names()) {
    PressureSpec spec;
    spec.name = name;
    const auto law = make_pressure_law(spec);
    for (double rho : {0.25, 2.0, 13.0, 60.0}) {
      const double coarse = potential_at(law, rho, 1.0, 1);
      const double fine = potential_at(law, rho, 1.0, 2);
      EXPECT_LT(std::abs(coarse - fine), 1e-6 * std::max(1.0, std::abs(fine))) << name << " rho=" << rho;
    }
  }
}

TEST(Potential, NondecreasingForMonotoneLaws) {
  for (const auto& law : {gamma_law(1.4), linear_law(), gamma_law(3.0)}) {
    for_cases(100, 21, [&](Gen& gen, int) {
      const double a = gen.uniform(law.rho_bar, 50.0);
      const double b = gen.uniform(a, 60.0);
      ASSERT_LE(potential_at(law, a), potential_at(law, b) + 1e-12) << law.name;
    });
  }
}

TEST(Potential, NonIntegrableOriginIsAConfigurationError) {
  auto law = linear_law();
  law.rho_bar = 0.0;
  try {
    potential_at(law, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidConfiguration);
  }
  auto ok = gamma_law(3.0);
  ok.rho_bar = 0.0;
  ok.c1 = 0.0;
  ok.c2 = 0.0;
  EXPECT_NEAR(potential_at(ok, 2.0), 2.0 * 2.0, 1e-10);  // rho * rho^2/2
}

TEST(ConditionP, BuiltinVerdicts) {
  for (const auto& name : builtin_pressure_names()) {
    PressureSpec spec;
    spec.name = name;
    const auto law = make_pressure_law(spec);
    const double rho_max = name == "bump" ? 20.0 : 100.0;
    const auto report = check_condition_p(law, rho_max, 400);
    const Verdict expected = name == "bump" ? Verdict::Fail : Verdict::Pass;
    EXPECT_EQ(report.verdict, expected) << name << " c_est=" << report.c_estimate;
  }
}

TEST(ConditionP, GammaLawAtTwoResolutions) {
  const auto law = gamma_law(1.4);
  const auto coarse = check_condition_p(law, 100.0, 64);
  const auto fine = check_condition_p(law, 100.0, 512);
  EXPECT_EQ(coarse.verdict, Verdict::Pass);
  EXPECT_EQ(fine.verdict, Verdict::Pass);
  EXPECT_NEAR(coarse.c_estimate, fine.c_estimate, 0.05 * fine.c_estimate);
}

TEST(ConditionP, BumpRatioGrowsAcrossQuartiles) {
  const auto report = check_condition_p(bump_law(), 20.0, 400);
  ASSERT_EQ(report.quartile_max.size(), 4u);
  for (int q = 1; q < 4; ++q) EXPECT_GT(report.quartile_max[q], report.quartile_max[q - 1]);
}

TEST(ConditionP, RejectsBadArguments) {
  EXPECT_THROW(check_condition_p(linear_law(), 0.5, 100), Error);
  EXPECT_THROW(check_condition_p(linear_law(), 100.0, 8), Error);
}

TEST(FindR, LinearLaw) {
  const double step = 1e-3;
  const double r = find_density_bound(linear_law(), 3.0, 1.0, step);
  EXPECT_GT(r, 3.0);
  EXPECT_LE(r, 3.0 * (1.0 + step) + 1e-12);
}

TEST(FindR, OscillatoryPostcondition) {
  const auto law = oscillatory_law(2.0);
  const double r = find_density_bound(law, 5.0, 1.0);
  EXPECT_GT(r, 1.0);
  EXPECT_GT(pressure_at(law, r), 5.0);
}

TEST(FindR, PostconditionOnRandomInputs) {
  for (const auto& name : builtin_pressure_names()) {
    if (name == "bump") continue;
    PressureSpec spec;
    spec.name = name;
    const auto law = make_pressure_law(spec);
    for_cases(30, 22, [&](Gen& gen, int) {
      const double M = gen.uniform(-1.0, 50.0);
      const double rho0_max = gen.uniform(0.0, 5.0);
      const double r = find_density_bound(law, M, rho0_max);
      ASSERT_GT(r, rho0_max);
      ASSERT_GT(pressure_at(law, r), M) << name;
    });
  }
}

TEST(FindR, BoundedLawIsUnbounded) {
  PressureLaw law;
  law.name = "atan";
  law.p = [](double rho) { return std::atan(rho); };
  try {
    find_density_bound(law, 2.0, 1.0, 0.05);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnboundedSearch);
  }
}

TEST(Builtins, VirialWarnsOnNegativeLeadingCoefficient) {
  EXPECT_FALSE(virial_law({1.0, -0.5, 0.2}).warnings.size() > 0);
  EXPECT_FALSE(virial_law({1.0, 0.5, -0.2}).warnings.empty());
  EXPECT_DOUBLE_EQ(pressure_at(virial_law({1.0, -0.5, 0.2}), 2.0), 2.0 - 2.0 + 1.6);
}

TEST(Builtins, VanDerWaalsJoinIsSmooth) {
  const double a = 3.0, b = 1.0 / 3.0, theta = 2.4;
  const auto law = van_der_waals_law(a, b, theta);
  const double rs = 1.0 / (2.0 * b);
  EXPECT_NEAR(pressure_at(law, 1.0), theta / (1.0 - b) - a, 1e-14);
  const double h = 1e-4;
  const auto d1 = [&](double x) { return (pressure_at(law, x + h) - pressure_at(law, x - h)) / (2 * h); };
  EXPECT_NEAR(pressure_at(law, rs - 1e-9), pressure_at(law, rs + 1e-9), 1e-6);
  EXPECT_NEAR(d1(rs - 2 * h), d1(rs + 2 * h), 1e-2);
  EXPECT_TRUE(std::isfinite(pressure_at(law, 1.0 / b)));
  EXPECT_TRUE(std::isfinite(pressure_at(law, 100.0)));
}

TEST(Builtins, UnknownNameIsAConfigurationError) {
  PressureSpec spec;
  spec.name = "ideal";
  try {
    make_pressure_law(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidConfiguration);
  }
}

TEST(Lipschitz, LinearAndQuadratic) {
  EXPECT_NEAR(lipschitz_estimate(linear_law(), 0.0, 5.0), 1.0, 1e-12);
  EXPECT_NEAR(lipschitz_estimate(gamma_law(2.0), 0.0, 3.0), 6.0, 1e-2);
}
