#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lagstokes/error.hpp"

namespace lagstokes {

/// A barotropic pressure law p(rho) together with the constants that enter
/// the energy potential
///
///   P(rho) = C * (rho * int_{rho_bar}^{rho} p(s)/s^2 ds + c1*rho + c2).
///
/// `breakpoints` (optional) lists densities in [lo, hi] where the integrand
/// changes character; quadrature splits there. `peaks` (optional) lists
/// densities where p/P has local maxima; the admissibility check samples them.
struct PressureLaw {
  std::string name;
  std::function<double(double)> p;
  double rho_bar = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
  std::function<std::vector<double>(double lo, double hi)> breakpoints;
  std::function<std::vector<double>(double lo, double hi)> peaks;
  Warnings warnings;
};

/// Builtin law selection as it appears in run configurations.
struct PressureSpec {
  std::string name = "linear";
  double gamma = 1.4;
  double vdw_a = 3.0;
  double vdw_b = 1.0 / 3.0;
  double vdw_theta = 2.4;
  std::vector<double> virial = {1.0, -0.5, 0.2};
  double osc_exponent = 2.0;
  double rho_bar = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
};

PressureLaw gamma_law(double gamma);
PressureLaw linear_law();
/// theta*rho/(1 - b*rho) - a*rho^2 below rho_s = 1/(2b); beyond rho_s the law
/// continues as its second-order Taylor polynomial at rho_s (C^2 join), which
/// removes the hard-core singularity at 1/b.
PressureLaw van_der_waals_law(double a, double b, double theta);
/// sum_k B_k rho^k with coefficients[k-1] = B_k.
PressureLaw virial_law(std::vector<double> coefficients);
/// rho^2 (1 + cos(rho^q)): drops to zero at every rho = ((2m+1) pi)^{1/q}.
PressureLaw oscillatory_law(double exponent);
/// rho^2 * bump(2^k (rho - k)) on |rho - k| <= 2^{-k}, zero elsewhere.
/// Bounded by a power law yet violates the admissibility condition.
PressureLaw bump_law();

/// Throws InvalidConfiguration for unknown names or bad parameters.
PressureLaw make_pressure_law(const PressureSpec& spec);
const std::vector<std::string>& builtin_pressure_names();

/// p(rho). Throws InvalidInput for rho < 0 or non-finite rho.
double pressure_at(const PressureLaw& law, double rho);

/// P(rho) with multiplier `c`. `resolution` splits every quadrature panel into
/// that many equal pieces before adaptive Gauss-Kronrod integration.
/// Throws InvalidConfiguration when rho_bar = 0 and p(s)/s^2 is not
/// integrable at the origin.
double potential_at(const PressureLaw& law, double rho, double c = 1.0, int resolution = 1);

enum class Verdict { Pass, Fail, Inconclusive };
const char* to_string(Verdict verdict);

struct ConditionPReport {
  std::vector<double> rho_samples;
  std::vector<double> ratio;          // p / max(P, eps) with C = 1
  double c_lower = 0.0;               // smallest C with -C <= p on the scan
  double c_estimate = 0.0;            // sup of ratio
  std::vector<double> quartile_max;   // max ratio per log-spaced quartile
  Verdict verdict = Verdict::Inconclusive;
};

/// Samples a geometric ladder from rho_bar to rho_max (plus the law's peak
/// hints) and classifies the tail of p/P. Verdict is pass when the last
/// quartile maximum is within 10% of the previous one, fail when the
/// quartile maxima grow strictly, inconclusive otherwise.
ConditionPReport check_condition_p(const PressureLaw& law, double rho_max, int n_samples);

/// Smallest scanned r > rho0_max with p(r) > M. Scan points are
/// rho0_max * (1 + step)^k, k = 1, 2, ...; throws UnboundedSearch past 1e6.
double find_density_bound(const PressureLaw& law, double M, double rho0_max, double step = 1e-3);

/// Largest finite-difference slope of p over `samples` uniform intervals of [lo, hi].
double lipschitz_estimate(const PressureLaw& law, double lo, double hi, int samples = 4096);

}  // namespace lagstokes
