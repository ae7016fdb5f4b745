#include "lagstokes/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lagstokes/parallel.hpp"

namespace lagstokes {

namespace {

double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace

double energy(const LagrangianState& state, const PressureLaw& law, double c) {
  const std::size_t labels = state.grid.size();
  std::vector<double> density(labels);
  parallel_for(labels, [&](std::size_t i) {
    density[i] = potential_at(law, state.eta[i], c) * std::exp(state.accum[i]);
  });
  return mean_of(density);
}

double energy(const ScalarField& rho, const PressureLaw& law, double c) {
  std::vector<double> density(rho.size());
  parallel_for(rho.size(), [&](std::size_t i) { density[i] = potential_at(law, rho[i], c); });
  return mean_of(density);
}

EnergyBalanceReport energy_balance_report(const LagrangianResult& run, const PressureLaw& law) {
  EnergyBalanceReport report;
  for (const auto& s : run.states) {
    report.times.push_back(s.time);
    report.energy.push_back(energy(s, law));
  }
  if (report.energy.empty()) return report;
  report.tolerance = 1e-6 * (1.0 + std::abs(report.energy.front()));
  const std::size_t windows = std::min(run.report.windows.size(), report.energy.size() - 1);
  for (std::size_t k = 0; k < windows; ++k) {
    const double increment = report.energy[k + 1] - report.energy[k];
    const double dissipation = run.report.windows[k].dissipation;
    report.increments.push_back(increment);
    report.entries.push_back(increment + dissipation);
    report.total_dissipation += dissipation;
    report.max_violation = std::max(report.max_violation, increment + dissipation);
    report.max_increase = std::max(report.max_increase, increment);
  }
  report.ok = report.max_violation <= report.tolerance && report.max_increase <= report.tolerance;
  return report;
}

namespace {

struct CubeStats {
  double average = 0.0;
  double oscillation = 0.0;
};

template <class Visit>
void for_each_cell(const TorusGrid& grid, const Cube& cube, Visit&& visit) {
  const int n = grid.n();
  if (grid.dim() == 1) {
    for (int a = 0; a < cube.side; ++a) visit(grid.index((cube.offset[0] + a) % n));
    return;
  }
  for (int a = 0; a < cube.side; ++a) {
    for (int b = 0; b < cube.side; ++b) visit(grid.index((cube.offset[0] + a) % n, (cube.offset[1] + b) % n));
  }
}

CubeStats cube_stats(const ScalarField& f, const Cube& cube) {
  // Summing offsets from the first cell keeps constant cubes exactly flat.
  double ref = 0.0;
  double sum = 0.0;
  std::size_t count = 0;
  for_each_cell(f.grid(), cube, [&](std::size_t i) {
    if (count == 0) ref = f[i];
    sum += f[i] - ref;
    ++count;
  });
  const double average = ref + sum / static_cast<double>(count);
  double dev = 0.0;
  for_each_cell(f.grid(), cube, [&](std::size_t i) { dev += std::abs(f[i] - average); });
  return {average, dev / static_cast<double>(count)};
}

}  // namespace

BmoReport bmo_seminorm(const ScalarField& f, int max_level) {
  const TorusGrid& grid = f.grid();
  const int n = grid.n();
  const int top = static_cast<int>(std::lround(std::log2(n))) - 1;
  if (max_level < 0 || max_level > top) {
    throw_invalid_input("max_level must lie in [0, " + std::to_string(top) + "]");
  }
  BmoReport report;
  report.worst = Cube{0, {0, 0}, n};
  for (int level = 0; level <= max_level; ++level) {
    report.cube_levels.push_back(level);
    const int side = n >> level;
    const int step = side / 2;
    const int per_axis = n / step;
    const int count = grid.dim() == 1 ? per_axis : per_axis * per_axis;
    std::vector<double> osc(static_cast<std::size_t>(count));
    parallel_for(osc.size(), [&](std::size_t c) {
      const int ci = static_cast<int>(c);
      const Cube cube{level, {(ci % per_axis) * step, grid.dim() == 1 ? 0 : (ci / per_axis) * step}, side};
      osc[c] = cube_stats(f, cube).oscillation;
    });
    for (int c = 0; c < count; ++c) {
      if (osc[static_cast<std::size_t>(c)] > report.seminorm) {
        report.seminorm = osc[static_cast<std::size_t>(c)];
        report.worst = Cube{level, {(c % per_axis) * step, grid.dim() == 1 ? 0 : (c / per_axis) * step}, side};
      }
    }
  }

  const CubeStats stats = cube_stats(f, report.worst);
  std::vector<double> g;
  for_each_cell(grid, report.worst, [&](std::size_t i) { g.push_back(std::abs(f[i] - stats.average)); });
  report.cube_cells = g.size();
  if (report.seminorm == 0.0) {
    report.exp_integral = 1.0;
    return report;
  }
  double exp_sum = 0.0;
  for (double v : g) exp_sum += std::exp(v / report.seminorm);
  report.exp_integral = exp_sum / static_cast<double>(g.size());
  for (int j = 0; j <= 400; ++j) {
    const double lambda = j * report.seminorm / 4.0;
    const auto above = std::count_if(g.begin(), g.end(), [lambda](double v) { return v > lambda; });
    const double fraction = static_cast<double>(above) / static_cast<double>(g.size());
    report.jn_curve.emplace_back(lambda, fraction);
    if (above == 0) break;
  }
  return report;
}

double bmo_bruteforce_1d(const ScalarField& f) {
  const TorusGrid& grid = f.grid();
  if (grid.dim() != 1) throw_invalid_input("brute-force BMO is one-dimensional");
  const int n = grid.n();
  std::vector<double> osc(static_cast<std::size_t>(n), 0.0);
  parallel_for(osc.size(), [&](std::size_t start) {
    double best = 0.0;
    for (int len = 1; len <= n; ++len) {
      const Cube cube{0, {static_cast<int>(start), 0}, len};
      best = std::max(best, cube_stats(f, cube).oscillation);
    }
    osc[start] = best;
  });
  return *std::max_element(osc.begin(), osc.end());
}

JohnNirenbergFit john_nirenberg_check(const BmoReport& report) {
  if (!(report.seminorm > 0.0)) throw_invalid_input("John-Nirenberg fit needs a positive seminorm");
  JohnNirenbergFit fit;
  fit.exp_integral = report.exp_integral;
  const auto& curve = report.jn_curve;
  if (curve.size() < 2) return fit;
  const double floor_value = 0.5 / static_cast<double>(std::max<std::size_t>(report.cube_cells, 1));

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto m = static_cast<double>(curve.size());
  for (const auto& [lambda, fraction] : curve) {
    const double x = lambda / report.seminorm;
    const double y = std::log(std::max(fraction, floor_value));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = m * sxx - sx * sx;
  if (denom <= 0.0) return fit;
  const double slope = (m * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / m;
  fit.c2 = -slope;
  fit.c1 = std::exp(intercept);
  fit.verdict = fit.c2 > 0.0 && std::isfinite(fit.exp_integral) ? Verdict::Pass : Verdict::Fail;
  return fit;
}

double log_inequality_ratio(const ScalarField& f, double f_seminorm, const ScalarField& g, double q) {
  if (!(f.grid() == g.grid())) throw_invalid_input("fields live on different grids");
  if (!(q > 2.0)) throw_invalid_input("exponent q must exceed 2");
  if (!(f_seminorm > 0.0)) throw_invalid_input("seminorm must be positive");
  double fg = 0.0, g1 = 0.0, gq = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    fg += f[i] * g[i];
    g1 += std::abs(g[i]);
    gq += std::pow(std::abs(g[i]), q);
  }
  const auto size = static_cast<double>(f.size());
  fg /= size;
  g1 /= size;
  gq = std::pow(gq / size, 1.0 / q);
  if (g1 == 0.0) return 0.0;
  const double log_g1 = std::abs(std::log(g1));
  const double rhs = f_seminorm * g1 *
                     (log_g1 + std::log(std::numbers::e + gq) + (1.0 + log_g1) * std::pow(gq, 0.5 * (q - 2.0)));
  return std::abs(fg) / rhs;
}

}  // namespace lagstokes
