#include "lagstokes/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace lagstokes {

namespace {

constexpr double kScanCap = 1e6;
constexpr double kRatioFloor = 1e-12;

[[noreturn]] void bad_config(const std::string& message) {
  throw Error(ErrorKind::InvalidConfiguration, message);
}

double smooth_bump(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - x * x));
}

// Panel edges for the quadrature of p(s)/s^2 on [lo, hi]: the law's own
// breakpoints plus decade splits, which keep the 1/s-type growth near the
// origin inside a single panel's polynomial reach.
std::vector<double> panel_edges(const PressureLaw& law, double lo, double hi) {
  std::vector<double> edges{lo, hi};
  if (law.breakpoints) {
    for (double b : law.breakpoints(lo, hi)) {
      if (b > lo && b < hi) edges.push_back(b);
    }
  }
  if (lo > 0.0) {
    for (double x = lo * 10.0; x < hi; x *= 10.0) edges.push_back(x);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

double integrate_over(const PressureLaw& law, double lo, double hi, int resolution) {
  if (lo == hi) return 0.0;
  auto integrand = [&law](double s) { return law.p(s) / (s * s); };
  const auto edges = panel_edges(law, lo, hi);
  double total = 0.0;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double a = edges[e];
    const double width = (edges[e + 1] - a) / resolution;
    for (int k = 0; k < resolution; ++k) {
      const double left = a + k * width;
      const double right = k + 1 == resolution ? edges[e + 1] : left + width;
      total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, left, right, 15, 1e-11);
    }
  }
  return total;
}

void require_integrable_at_origin(const PressureLaw& law) {
  if (law.rho_bar > 0.0) return;
  const double eps = 1e-8;
  if (law.p(0.0) != 0.0 || std::abs(law.p(eps)) / eps > 1e-3) {
    bad_config("pressure law '" + law.name +
               "': p(s)/s^2 is not integrable at 0; choose rho_bar > 0");
  }
}

}  // namespace

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

PressureLaw gamma_law(double gamma) {
  if (!(gamma > 0.0)) bad_config("gamma must be positive");
  PressureLaw law;
  law.name = "gamma";
  law.p = [gamma](double rho) { return std::pow(rho, gamma); };
  return law;
}

PressureLaw linear_law() {
  PressureLaw law;
  law.name = "linear";
  law.p = [](double rho) { return rho; };
  return law;
}

PressureLaw van_der_waals_law(double a, double b, double theta) {
  if (!(b > 0.0) || !(theta > 0.0) || !(a >= 0.0)) bad_config("van der Waals needs a >= 0, b > 0, theta > 0");
  const double rs = 0.5 / b;
  const double q = 1.0 - b * rs;
  const double p0 = theta * rs / q - a * rs * rs;
  const double d1 = theta / (q * q) - 2.0 * a * rs;
  const double d2 = 2.0 * theta * b / (q * q * q) - 2.0 * a;
  PressureLaw law;
  law.name = "van-der-waals";
  law.p = [=](double rho) {
    if (rho <= rs) return theta * rho / (1.0 - b * rho) - a * rho * rho;
    const double x = rho - rs;
    return p0 + d1 * x + 0.5 * d2 * x * x;
  };
  law.breakpoints = [rs](double lo, double hi) {
    return rs > lo && rs < hi ? std::vector<double>{rs} : std::vector<double>{};
  };
  if (d2 <= 0.0) law.warnings.push_back("van der Waals tail is not convex; pressure may be bounded above");
  return law;
}

PressureLaw virial_law(std::vector<double> coefficients) {
  if (coefficients.empty()) bad_config("virial series needs at least one coefficient");
  PressureLaw law;
  law.name = "virial";
  if (coefficients.back() < 0.0) {
    law.warnings.push_back("leading virial coefficient B_K < 0: tail is decreasing");
  }
  law.p = [c = std::move(coefficients)](double rho) {
    double sum = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) sum = sum * rho + *it;
    return sum * rho;
  };
  return law;
}

PressureLaw oscillatory_law(double exponent) {
  if (!(exponent >= 1.0)) bad_config("oscillatory exponent must be >= 1 so that f' is increasing");
  PressureLaw law;
  law.name = "oscillatory";
  law.p = [exponent](double rho) { return rho * rho * (1.0 + std::cos(std::pow(rho, exponent))); };
  // Multiples of pi in the phase: zeros and peaks of the cosine.
  auto phase_points = [exponent](double lo, double hi, double period, double offset) {
    std::vector<double> points;
    const double lo_phase = std::pow(lo, exponent);
    const double hi_phase = std::pow(hi, exponent);
    for (auto m = static_cast<long>(std::ceil((lo_phase - offset) / period));; ++m) {
      const double phase = offset + period * static_cast<double>(m);
      if (phase > hi_phase) break;
      if (phase > 0.0) points.push_back(std::pow(phase, 1.0 / exponent));
    }
    return points;
  };
  law.breakpoints = [phase_points](double lo, double hi) {
    return phase_points(lo, hi, std::numbers::pi, 0.0);
  };
  law.peaks = [phase_points](double lo, double hi) {
    return phase_points(lo, hi, 2.0 * std::numbers::pi, 0.0);
  };
  return law;
}

PressureLaw bump_law() {
  PressureLaw law;
  law.name = "bump";
  law.p = [](double rho) {
    const double k = std::round(rho);
    if (k < 1.0 || k > 60.0) return 0.0;
    const double scale = std::ldexp(1.0, static_cast<int>(k));
    return rho * rho * smooth_bump(scale * (rho - k));
  };
  law.breakpoints = [](double lo, double hi) {
    std::vector<double> points;
    for (int k = std::max(1, static_cast<int>(std::floor(lo))); k <= std::min(60, static_cast<int>(std::ceil(hi))); ++k) {
      const double half = std::ldexp(1.0, -k);
      for (double x : {k - half, static_cast<double>(k), k + half}) {
        if (x > lo && x < hi) points.push_back(x);
      }
    }
    return points;
  };
  law.peaks = [](double lo, double hi) {
    std::vector<double> points;
    for (int k = std::max(1, static_cast<int>(std::ceil(lo))); k <= std::min(60, static_cast<int>(std::floor(hi))); ++k) {
      points.push_back(k);
    }
    return points;
  };
  return law;
}

const std::vector<std::string>& builtin_pressure_names() {
  static const std::vector<std::string> names{"gamma", "linear", "van-der-waals", "virial", "oscillatory", "bump"};
  return names;
}

PressureLaw make_pressure_law(const PressureSpec& spec) {
  PressureLaw law;
  if (spec.name == "gamma") {
    law = gamma_law(spec.gamma);
  } else if (spec.name == "linear") {
    law = linear_law();
  } else if (spec.name == "van-der-waals") {
    law = van_der_waals_law(spec.vdw_a, spec.vdw_b, spec.vdw_theta);
  } else if (spec.name == "virial") {
    law = virial_law(spec.virial);
  } else if (spec.name == "oscillatory") {
    law = oscillatory_law(spec.osc_exponent);
  } else if (spec.name == "bump") {
    law = bump_law();
  } else {
    bad_config("unknown pressure law '" + spec.name + "'");
  }
  if (!(spec.rho_bar >= 0.0)) bad_config("rho_bar must be nonnegative");
  law.rho_bar = spec.rho_bar;
  law.c1 = spec.c1;
  law.c2 = spec.c2;
  return law;
}

double pressure_at(const PressureLaw& law, double rho) {
  if (!std::isfinite(rho) || rho < 0.0) throw_invalid_input("density must be finite and nonnegative");
  return law.p(rho);
}

double potential_at(const PressureLaw& law, double rho, double c, int resolution) {
  if (!std::isfinite(rho) || rho < 0.0) throw_invalid_input("density must be finite and nonnegative");
  if (resolution < 1) throw_invalid_input("quadrature resolution must be >= 1");
  require_integrable_at_origin(law);
  double rho_integral = 0.0;
  if (rho == 0.0) {
    // rho * int_{rho_bar}^{rho} p/s^2 -> -p(0) as rho -> 0+.
    rho_integral = -law.p(0.0);
  } else if (rho != law.rho_bar) {
    const double lo = std::min(rho, law.rho_bar);
    const double hi = std::max(rho, law.rho_bar);
    const double integral = integrate_over(law, lo, hi, resolution);
    rho_integral = rho * (rho > law.rho_bar ? integral : -integral);
  }
  return c * (rho_integral + law.c1 * rho + law.c2);
}

ConditionPReport check_condition_p(const PressureLaw& law, double rho_max, int n_samples) {
  if (!(rho_max > law.rho_bar)) throw_invalid_input("rho_max must exceed rho_bar");
  if (n_samples < 16) throw_invalid_input("check_condition_p needs at least 16 samples");
  require_integrable_at_origin(law);

  const double rho_lo = law.rho_bar > 0.0 ? law.rho_bar : rho_max * 1e-3;
  std::vector<double> samples;
  const double log_span = std::log(rho_max / rho_lo);
  for (int i = 0; i < n_samples; ++i) {
    samples.push_back(rho_lo * std::exp(log_span * i / (n_samples - 1)));
  }
  samples.back() = rho_max;
  if (law.peaks) {
    for (double x : law.peaks(rho_lo, rho_max)) {
      if (x >= rho_lo && x <= rho_max) samples.push_back(x);
    }
  }
  std::sort(samples.begin(), samples.end());
  samples.erase(std::unique(samples.begin(), samples.end()), samples.end());

  ConditionPReport report;
  report.rho_samples = samples;
  report.ratio.reserve(samples.size());
  // Running integral from rho_bar (or from rho_lo when rho_bar = 0, plus
  // the head [0, rho_lo]).
  double integral = law.rho_bar > 0.0 ? 0.0 : integrate_over(law, 0.0, rho_lo, 1);
  double previous = rho_lo;
  double min_p = std::numeric_limits<double>::infinity();
  for (double rho : samples) {
    integral += integrate_over(law, previous, rho, 1);
    previous = rho;
    const double p = law.p(rho);
    min_p = std::min(min_p, p);
    const double potential = rho * integral + law.c1 * rho + law.c2;
    report.ratio.push_back(p / std::max(potential, kRatioFloor));
  }
  for (int i = 0; i <= 256; ++i) min_p = std::min(min_p, law.p(rho_max * i / 256.0));
  report.c_lower = std::max(0.0, -min_p);
  report.c_estimate = *std::max_element(report.ratio.begin(), report.ratio.end());

  std::vector<double> quartile(4, -std::numeric_limits<double>::infinity());
  std::vector<bool> seen(4, false);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    int q = static_cast<int>(4.0 * std::log(samples[i] / rho_lo) / log_span);
    q = std::clamp(q, 0, 3);
    quartile[q] = std::max(quartile[q], report.ratio[i]);
    seen[q] = true;
  }
  report.quartile_max = quartile;
  if (!std::all_of(seen.begin(), seen.end(), [](bool s) { return s; }) || !std::isfinite(report.c_estimate)) {
    report.verdict = Verdict::Inconclusive;
  } else if (quartile[3] <= 1.1 * quartile[2]) {
    report.verdict = Verdict::Pass;
  } else if (quartile[0] < quartile[1] && quartile[1] < quartile[2] && quartile[2] < quartile[3]) {
    report.verdict = Verdict::Fail;
  } else {
    report.verdict = Verdict::Inconclusive;
  }
  return report;
}

double find_density_bound(const PressureLaw& law, double M, double rho0_max, double step) {
  if (!std::isfinite(M)) throw_invalid_input("find_density_bound needs a finite M");
  if (!(step > 0.0)) throw_invalid_input("scan step must be positive");
  if (!(rho0_max >= 0.0)) throw_invalid_input("rho0_max must be nonnegative");
  const double base = rho0_max > 0.0 ? rho0_max : step;
  const double factor = 1.0 + step;
  for (double r = base * factor; r <= kScanCap; r *= factor) {
    if (law.p(r) > M) return r;
  }
  throw Error(ErrorKind::UnboundedSearch, "no density r <= 1e6 with p(r) > " + std::to_string(M) +
                                              " for law '" + law.name + "'; law may be bounded");
}

double lipschitz_estimate(const PressureLaw& law, double lo, double hi, int samples) {
  if (!(hi > lo) || samples < 1) throw_invalid_input("lipschitz_estimate needs hi > lo and samples >= 1");
  const double h = (hi - lo) / samples;
  double lip = 0.0;
  double prev = law.p(lo);
  for (int i = 1; i <= samples; ++i) {
    const double next = law.p(lo + i * h);
    lip = std::max(lip, std::abs(next - prev) / h);
    prev = next;
  }
  return lip;
}

}  // namespace lagstokes
