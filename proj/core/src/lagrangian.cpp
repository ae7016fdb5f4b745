#include "lagstokes/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lagstokes/parallel.hpp"

namespace lagstokes {

namespace {

constexpr double kMaxExponent = 700.0;

[[noreturn]] void bad_config(const std::string& message) {
  throw Error(ErrorKind::InvalidConfiguration, message);
}

void validate(const LagrangianRunConfig& cfg) {
  if (!(cfg.window > 0.0)) bad_config("window must be positive");
  if (!(cfg.picard_tol > 0.0)) bad_config("picard_tol must be positive");
  if (cfg.picard_max < 1) bad_config("picard_max must be at least 1");
  if (cfg.quad_nodes_per_window < 2) bad_config("quad_nodes_per_window must be at least 2");
  if (!(cfg.final_time >= 0.0) || !std::isfinite(cfg.final_time)) bad_config("final_time must be finite and >= 0");
}

double weighted_mean(const std::vector<double>& p_values, const std::vector<double>& accum) {
  double sum = 0.0;
  for (std::size_t i = 0; i < accum.size(); ++i) {
    if (accum[i] > kMaxExponent) {
      throw Error(ErrorKind::Divergence, "accumulated divergence exceeds 700; int sigma is blowing up");
    }
    sum += p_values[i] * std::exp(accum[i]);
  }
  return sum / static_cast<double>(accum.size());
}

std::vector<double> evaluate_pressure(const PressureLaw& law, const std::vector<double>& eta) {
  std::vector<double> out(eta.size());
  parallel_for(eta.size(), [&](std::size_t i) { out[i] = law.p(eta[i]); });
  return out;
}

void rebuild_accum(WindowTrajectory& tr, const std::vector<double>& accum_start) {
  tr.accum[0] = accum_start;
  for (std::size_t j = 1; j < tr.times.size(); ++j) {
    const double half = 0.5 * (tr.times[j] - tr.times[j - 1]);
    auto& a = tr.accum[j];
    const auto& prev = tr.accum[j - 1];
    const auto& s0 = tr.sigma[j - 1];
    const auto& s1 = tr.sigma[j];
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = prev[i] + half * (s0[i] + s1[i]);
  }
}

double max_value(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

double pressure_scale(const PressureLaw& law, double hi) {
  double sup_p = 0.0;
  for (int i = 0; i <= 1024; ++i) sup_p = std::max(sup_p, std::abs(law.p(hi * i / 1024.0)));
  return std::max(lipschitz_estimate(law, 0.0, hi), sup_p);
}

double conservation_defect(const LagrangianState& s) {
  double worst = 0.0;
  for (std::size_t i = 0; i < s.rho0.size(); ++i) {
    worst = std::max(worst, std::abs(s.eta[i] * std::exp(s.accum[i]) - s.rho0[i]));
  }
  return worst;
}

}  // namespace

LagrangianState initial_state(const ScalarField& rho0, const PressureLaw& law) {
  const auto& grid = rho0.grid();
  std::vector<double> eta(rho0.values().begin(), rho0.values().end());
  for (double v : eta) {
    if (v < 0.0) throw_invalid_input("initial density must be nonnegative");
  }
  const std::vector<double> zero(grid.size(), 0.0);
  const auto p = evaluate_pressure(law, eta);
  const double w = weighted_mean(p, zero);
  std::vector<double> sigma(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) sigma[i] = p[i] - w;
  return LagrangianState{grid, rho0, ScalarField(grid, eta), ScalarField(grid, std::move(sigma)),
                         ScalarField(grid), 0.0};
}

double weighted_mean_pressure(const ScalarField& eta, const ScalarField& accum, const PressureLaw& law) {
  if (!(eta.grid() == accum.grid())) throw_invalid_input("eta and accum live on different grids");
  const std::vector<double> e(eta.values().begin(), eta.values().end());
  const std::vector<double> a(accum.values().begin(), accum.values().end());
  return weighted_mean(evaluate_pressure(law, e), a);
}

int sigma_fixed_point(WindowTrajectory& tr, const std::vector<double>& accum_start, const PressureLaw& law,
                      const LagrangianRunConfig& cfg) {
  const std::size_t nodes = tr.times.size();
  std::vector<std::vector<double>> p(nodes);
  for (std::size_t j = 0; j < nodes; ++j) p[j] = evaluate_pressure(law, tr.eta[j]);
  tr.weighted_mean.assign(nodes, 0.0);

  std::vector<double> residuals;
  for (int iter = 1; iter <= cfg.picard_max; ++iter) {
    rebuild_accum(tr, accum_start);
    double residual = 0.0;
    for (std::size_t j = 0; j < nodes; ++j) {
      const double w = weighted_mean(p[j], tr.accum[j]);
      tr.weighted_mean[j] = w;
      auto& s = tr.sigma[j];
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double next = p[j][i] - w;
        residual = std::max(residual, std::abs(next - s[i]));
        s[i] = next;
      }
    }
    residuals.push_back(residual);
    if (residual <= cfg.picard_tol) {
      rebuild_accum(tr, accum_start);
      return iter;
    }
  }
  throw NoContractionError("sigma iteration did not reach tolerance in " + std::to_string(cfg.picard_max) +
                               " iterations; shrink the window",
                           std::move(residuals));
}

WindowStep step_window(const LagrangianState& state, const PressureLaw& law, const LagrangianRunConfig& cfg,
                       double tau, double blowup_bound) {
  validate(cfg);
  if (!(tau > 0.0)) bad_config("window length must be positive");
  const auto& grid = state.grid;
  const std::size_t labels = grid.size();
  const auto nodes = static_cast<std::size_t>(cfg.quad_nodes_per_window);

  const std::vector<double> rho0(state.rho0.values().begin(), state.rho0.values().end());
  const std::vector<double> eta0(state.eta.values().begin(), state.eta.values().end());
  const std::vector<double> sigma0(state.sigma.values().begin(), state.sigma.values().end());
  const std::vector<double> accum0(state.accum.values().begin(), state.accum.values().end());

  WindowTrajectory tr;
  for (std::size_t j = 0; j < nodes; ++j) {
    tr.times.push_back(j + 1 == nodes ? state.time + tau
                                      : state.time + tau * static_cast<double>(j) / static_cast<double>(nodes - 1));
  }
  tr.eta.assign(nodes, eta0);
  tr.sigma.assign(nodes, sigma0);
  tr.accum.assign(nodes, accum0);

  WindowRecord record;
  record.t0 = state.time;
  record.t1 = state.time + tau;
  std::vector<double> residuals;
  bool converged = false;
  for (int outer = 1; outer <= cfg.picard_max; ++outer) {
    record.inner_iterations += sigma_fixed_point(tr, accum0, law, cfg);
    double change = 0.0;
    for (std::size_t j = 0; j < nodes; ++j) {
      auto& e = tr.eta[j];
      const auto& a = tr.accum[j];
      for (std::size_t i = 0; i < labels; ++i) {
        const double next = rho0[i] * std::exp(-a[i]);
        change = std::max(change, std::abs(next - e[i]));
        e[i] = next;
        if (next > blowup_bound) {
          throw Error(ErrorKind::Divergence, "eta exceeded 10 r at t = " + std::to_string(tr.times[j]));
        }
      }
    }
    residuals.push_back(change);
    record.outer_iterations = outer;
    record.residual = change;
    if (change <= cfg.picard_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NoContractionError("eta iteration did not reach tolerance in " + std::to_string(cfg.picard_max) +
                                 " iterations; shrink the window",
                             std::move(residuals));
  }

  for (std::size_t j = 0; j < nodes; ++j) {
    record.max_weighted_mean = std::max(record.max_weighted_mean, tr.weighted_mean[j]);
  }
  std::vector<double> density(nodes);
  for (std::size_t j = 0; j < nodes; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < labels; ++i) sum += tr.sigma[j][i] * tr.sigma[j][i] * std::exp(tr.accum[j][i]);
    density[j] = sum / static_cast<double>(labels);
  }
  for (std::size_t j = 1; j < nodes; ++j) {
    record.dissipation += 0.5 * (tr.times[j] - tr.times[j - 1]) * (density[j] + density[j - 1]);
  }

  LagrangianState next{grid,
                       state.rho0,
                       ScalarField(grid, tr.eta.back()),
                       ScalarField(grid, tr.sigma.back()),
                       ScalarField(grid, tr.accum.back()),
                       record.t1};
  return WindowStep{std::move(next), record, std::move(tr)};
}

LagrangianResult run_lagrangian(const ScalarField& rho0, const PressureLaw& law, const LagrangianRunConfig& cfg) {
  validate(cfg);
  LagrangianResult result;
  auto& report = result.report;
  report.warnings = law.warnings;

  LagrangianState state = initial_state(rho0, law);
  const double rho0_max = max_value(rho0.values());
  report.M = weighted_mean_pressure(state.eta, state.accum, law);
  report.r = find_density_bound(law, report.M, rho0_max);
  report.sup_eta = rho0_max;
  result.states.push_back(state);

  const double horizon = cfg.final_time;
  const double end_slack = 1e-12 * std::max(1.0, horizon);

  if (rho0_max == 0.0) {
    // sigma = p(0) - p(0) = 0: the zero state is stationary.
    report.tau_initial = report.tau_final = cfg.window;
    while (state.time < horizon - end_slack) {
      const double tau = std::min(cfg.window, horizon - state.time);
      WindowRecord record;
      record.t0 = state.time;
      record.t1 = state.time + tau;
      state.time = record.t1;
      report.windows.push_back(record);
      result.states.push_back(state);
    }
    report.lipschitz_on_r = lipschitz_estimate(law, 0.0, report.r);
    return result;
  }

  double estimated_for = rho0_max;
  auto choose_tau = [&](double sup_eta) {
    report.c_estimate = pressure_scale(law, 2.0 * sup_eta);
    if (!cfg.adapt_window || report.c_estimate <= 0.0) return cfg.window;
    return std::min(cfg.window, 0.5 / report.c_estimate);
  };
  double tau = choose_tau(rho0_max);
  report.tau_initial = tau;

  while (state.time < horizon - end_slack) {
    double step = std::min(tau, horizon - state.time);
    if (horizon - (state.time + step) < end_slack) step = horizon - state.time;
    WindowStep advanced = step_window(state, law, cfg, step, 10.0 * report.r);
    state = std::move(advanced.state);
    if (advanced.record.t1 >= horizon - end_slack) state.time = horizon;

    if (advanced.record.max_weighted_mean > report.M) {
      report.M = advanced.record.max_weighted_mean;
      report.r = std::max(report.r, find_density_bound(law, report.M, rho0_max));
    }
    for (const auto& eta_j : advanced.trajectory.eta) {
      report.sup_eta = std::max(report.sup_eta, max_value(eta_j));
    }
    if (report.sup_eta > report.r * (1.0 + 1e-9)) {
      throw Error(ErrorKind::BoundViolation, "sup eta = " + std::to_string(report.sup_eta) +
                                                 " exceeds the density bound r = " + std::to_string(report.r));
    }
    report.conservation_defect = std::max(report.conservation_defect, conservation_defect(state));
    report.windows.push_back(advanced.record);
    result.states.push_back(state);

    if (report.sup_eta > 1.25 * estimated_for) {
      estimated_for = report.sup_eta;
      tau = choose_tau(estimated_for);
    }
  }
  report.tau_final = tau;
  report.lipschitz_on_r = lipschitz_estimate(law, 0.0, report.r);
  return result;
}

}  // namespace lagstokes
