#include "lagstokes/eulerian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lagstokes/parallel.hpp"
#include "lagstokes/spectral.hpp"

namespace lagstokes {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double periodized_gaussian(double d, double delta) {
  double sum = 0.0;
  for (int m = -3; m <= 3; ++m) {
    const double z = (d + m) / delta;
    sum += std::exp(-0.5 * z * z);
  }
  return sum;
}

ScalarField derivative(const ScalarField& f, int axis) {
  const TorusGrid& grid = f.grid();
  auto c = spectral::forward(f);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (spectral::is_nyquist(grid, i, axis)) {
      c[i] = 0.0;
      continue;
    }
    const double k = spectral::wavevector(grid, i)[static_cast<std::size_t>(axis)];
    c[i] *= std::complex<double>(0.0, kTwoPi * k);
  }
  return spectral::inverse(grid, std::move(c));
}

double sup_difference(const VectorField& a, const VectorField& b) {
  double worst = 0.0;
  for (int c = 0; c < a.grid().dim(); ++c) {
    const auto x = a.component(c);
    const auto y = b.component(c);
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
  }
  return worst;
}

VectorField reconstruct_node(const VelocityHistory& ubar, const ScalarField& sigma_delta, double t, double dt,
                             double& discarded_mean) {
  const TorusGrid& grid = sigma_delta.grid();
  const auto y = inverse_flow(ubar, t, dt);
  std::vector<double> rhs(grid.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = interpolate(sigma_delta, y[i]);
  auto solution = solve_poisson_periodic(ScalarField(grid, std::move(rhs)));
  discarded_mean = std::max(discarded_mean, std::abs(solution.discarded_mean));
  return gradient_spectral(solution.phi);
}

void require_matching(const VelocityHistory& u, const ScalarHistory& sigma) {
  validate_history(u);
  validate_history(sigma);
  if (u.times != sigma.times) throw_invalid_input("velocity and sigma histories must share time nodes");
  if (!(u.grid() == sigma.grid())) throw_invalid_input("velocity and sigma histories live on different grids");
}

}  // namespace

ScalarField mollify(const ScalarField& f, const MollifierSpec& spec, Warnings* warnings) {
  if (!(spec.delta > 0.0) || !std::isfinite(spec.delta)) throw_invalid_input("mollifier width must be positive");
  const TorusGrid& grid = f.grid();
  if (spec.delta < 2.0 * grid.spacing()) {
    warn(warnings, "mollifier width " + std::to_string(spec.delta) + " is below two grid spacings; skipped");
    return f;
  }
  std::vector<double> kernel(grid.size());
  double mass = 0.0;
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    const Point x = grid.node(i);
    double k = periodized_gaussian(x[0], spec.delta);
    if (grid.dim() == 2) k *= periodized_gaussian(x[1], spec.delta);
    kernel[i] = k;
    mass += k;
  }
  for (double& k : kernel) k /= mass;

  const auto symbol = spectral::forward(ScalarField(grid, std::move(kernel)));
  auto c = spectral::forward(f);
  const auto size = static_cast<double>(grid.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= size * symbol[i].real();
  ScalarField smooth = spectral::inverse(grid, std::move(c));

  // A nonnegative unit-mass kernel cannot leave [min f, max f]; clamp FFT roundoff.
  const auto [lo, hi] = std::minmax_element(f.values().begin(), f.values().end());
  std::vector<double> values(smooth.values().begin(), smooth.values().end());
  for (double& v : values) v = std::clamp(v, *lo, *hi);
  return ScalarField(grid, std::move(values));
}

ScalarHistory mollify(const ScalarHistory& f, const MollifierSpec& spec, Warnings* warnings) {
  validate_history(f);
  ScalarHistory out;
  out.times = f.times;
  for (std::size_t k = 0; k < f.size(); ++k) out.fields.push_back(mollify(f.fields[k], spec, k == 0 ? warnings : nullptr));
  return out;
}

PoissonSolution solve_poisson_periodic(const ScalarField& rhs) {
  const TorusGrid& grid = rhs.grid();
  auto c = spectral::forward(rhs);
  const double discarded = c[0].real();
  c[0] = 0.0;
  for (std::size_t i = 1; i < c.size(); ++i) {
    const auto k = spectral::wavevector(grid, i);
    const double k2 = static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1];
    c[i] /= -kTwoPi * kTwoPi * k2;
  }
  return PoissonSolution{spectral::inverse(grid, std::move(c)), discarded};
}

VectorField gradient_spectral(const ScalarField& phi) {
  const TorusGrid& grid = phi.grid();
  std::vector<std::vector<double>> comps;
  for (int axis = 0; axis < grid.dim(); ++axis) {
    const ScalarField d = derivative(phi, axis);
    comps.emplace_back(d.values().begin(), d.values().end());
  }
  return VectorField(grid, std::move(comps));
}

ScalarField divergence_spectral(const VectorField& u) {
  const TorusGrid& grid = u.grid();
  ScalarField div = derivative(u.component_field(0), 0);
  if (grid.dim() == 2) div = linear_combination(1.0, div, 1.0, derivative(u.component_field(1), 1));
  return div;
}

ScalarField laplacian_spectral(const ScalarField& f) {
  const TorusGrid& grid = f.grid();
  auto c = spectral::forward(f);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto k = spectral::wavevector(grid, i);
    c[i] *= -kTwoPi * kTwoPi * (static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1]);
  }
  return spectral::inverse(grid, std::move(c));
}

ScalarField curl_spectral(const VectorField& u) {
  if (u.grid().dim() != 2) throw_invalid_input("curl needs a two-dimensional field");
  return linear_combination(1.0, derivative(u.component_field(1), 0), -1.0, derivative(u.component_field(0), 1));
}

double gradient_sup(const ScalarField& f) {
  double sup = 0.0;
  for (int axis = 0; axis < f.grid().dim(); ++axis) sup = std::max(sup, max_abs(derivative(f, axis)));
  return sup;
}

double poisson_gradient_bound(const TorusGrid& grid) {
  double bound = 0.0;
  for (int k = 1; k <= 4; ++k) {
    const auto probe = ScalarField::from_function(grid, [k](const Point& x) { return std::cos(kTwoPi * k * x[0]); });
    const auto u = gradient_spectral(solve_poisson_periodic(probe).phi);
    double sup = 0.0;
    for (int c = 0; c < grid.dim(); ++c) sup = std::max(sup, max_abs(u.component_field(c)));
    bound = std::max(bound, sup / max_abs(probe));
  }
  return bound;
}

VelocityHistory zero_velocity(const ScalarHistory& like) {
  validate_history(like);
  VelocityHistory u;
  u.times = like.times;
  u.fields.assign(like.size(), VectorField(like.grid()));
  return u;
}

VelocityHistory phi_map(const VelocityHistory& ubar, const ScalarHistory& sigma_delta, double dt,
                        double* discarded_mean) {
  require_matching(ubar, sigma_delta);
  VelocityHistory out;
  out.times = ubar.times;
  double discarded = 0.0;
  for (std::size_t k = 0; k < ubar.size(); ++k) {
    out.fields.push_back(reconstruct_node(ubar, sigma_delta.fields[k], ubar.times[k], dt, discarded));
  }
  if (discarded_mean != nullptr) *discarded_mean = discarded;
  return out;
}

double contraction_window(const ScalarHistory& sigma_delta) {
  validate_history(sigma_delta);
  double grad = 0.0;
  for (const auto& f : sigma_delta.fields) grad = std::max(grad, gradient_sup(f));
  if (grad == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 / (poisson_gradient_bound(sigma_delta.grid()) * grad);
}

FixedPointResult phi_fixed_point(const ScalarHistory& sigma_delta, double window, const EulerianConfig& cfg,
                                 const VelocityHistory* initial) {
  validate_history(sigma_delta);
  if (!(window > 0.0)) throw_invalid_input("fixed-point window must be positive");
  if (cfg.max_iter < 1 || !(cfg.tol > 0.0)) throw_invalid_input("fixed-point tolerance and iteration cap must be positive");

  FixedPointResult result;
  result.window = window;
  if (initial != nullptr) {
    require_matching(*initial, sigma_delta);
    result.u = *initial;
  } else {
    result.u = phi_map(zero_velocity(sigma_delta), sigma_delta, cfg.dt, &result.discarded_mean);
  }
  auto& u = result.u;
  const auto& times = sigma_delta.times;

  // At the first node the inverse flow is the identity, so u there does not
  // depend on the iterate.
  {
    double discarded = 0.0;
    u.fields[0] = reconstruct_node(u, sigma_delta.fields[0], times[0], cfg.dt, discarded);
    result.discarded_mean = std::max(result.discarded_mean, discarded);
  }

  std::size_t first = 1;
  while (first < times.size()) {
    std::size_t last = first;
    while (last + 1 < times.size() && times[last + 1] <= times[first - 1] + window) ++last;

    WindowTrace trace{times[first - 1], times[last], {}};
    bool converged = false;
    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
      std::vector<VectorField> next;
      double discarded = 0.0;
      for (std::size_t k = first; k <= last; ++k) {
        next.push_back(reconstruct_node(u, sigma_delta.fields[k], times[k], cfg.dt, discarded));
      }
      double change = 0.0;
      for (std::size_t k = first; k <= last; ++k) {
        change = std::max(change, sup_difference(next[k - first], u.fields[k]));
        u.fields[k] = std::move(next[k - first]);
      }
      result.discarded_mean = std::max(result.discarded_mean, discarded);
      trace.residuals.push_back(change);
      ++result.iterations;
      if (change <= cfg.tol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw NoContractionError("velocity iteration on [" + std::to_string(trace.t0) + ", " +
                                   std::to_string(trace.t1) + "] did not reach tolerance",
                               trace.residuals);
    }
    result.windows.push_back(std::move(trace));
    first = last + 1;
  }
  return result;
}

double reconstruction_residual(const FlowMap& flow, const VelocityHistory& u, const ScalarHistory& sigma) {
  require_matching(u, sigma);
  if (flow.times != u.times) throw_invalid_input("flow and velocity must share time nodes");
  double worst = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const ScalarField div = divergence_spectral(u.fields[k]);
    double sum = 0.0;
    for (std::size_t i = 0; i < flow.grid.size(); ++i) {
      const double e = interpolate(div, flow.positions[k][i]) - sigma.fields[k][i];
      sum += e * e;
    }
    worst = std::max(worst, std::sqrt(sum / static_cast<double>(flow.grid.size())));
  }
  return worst;
}

double reconstruction_residual(const VelocityHistory& u, const ScalarHistory& sigma, double dt) {
  require_matching(u, sigma);
  return reconstruction_residual(integrate_flow(u, dt), u, sigma);
}

ReconstructionResult delta_continuation(const ScalarHistory& sigma, const std::vector<double>& ladder,
                                        const EulerianConfig& cfg) {
  validate_history(sigma);
  if (ladder.empty()) throw_invalid_input("delta ladder is empty");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i] > 0.0)) throw_invalid_input("delta ladder entries must be positive");
    if (i > 0 && !(ladder[i] < ladder[i - 1])) throw_invalid_input("delta ladder must decrease strictly");
  }

  ReconstructionResult result;
  auto& report = result.report;
  report.ladder = ladder;
  const VelocityHistory* warm = nullptr;

  for (double delta : ladder) {
    const ScalarHistory sigma_delta = mollify(sigma, MollifierSpec{delta}, &report.warnings);
    LevelReport level;
    level.delta = delta;
    const double base_window = cfg.window > 0.0 ? cfg.window : contraction_window(sigma_delta);

    std::optional<FixedPointResult> solved;
    for (int h = 0; h <= cfg.max_halvings; ++h) {
      level.window = std::ldexp(base_window, -h);
      level.halvings = h;
      try {
        solved = phi_fixed_point(sigma_delta, level.window, cfg, warm);
        break;
      } catch (const NoContractionError& e) {
        level.last_window_residuals = e.residuals();
        if (h == cfg.max_halvings) {
          report.failure = "delta = " + std::to_string(delta) + ": " + e.what();
        }
      }
    }
    if (!solved) break;

    level.iterations = solved->iterations;
    if (!solved->windows.empty()) level.last_window_residuals = solved->windows.back().residuals;
    level.discarded_mean = solved->discarded_mean;
    if (level.discarded_mean > 1e-3) {
      report.warnings.push_back("delta = " + std::to_string(delta) + ": projected Poisson mean " +
                                std::to_string(level.discarded_mean) + " exceeds 1e-3");
    }
    FlowMap flow = integrate_flow(solved->u, cfg.dt);
    level.reconstruction_residual = reconstruction_residual(flow, solved->u, sigma_delta);
    level.limit_residual = reconstruction_residual(flow, solved->u, sigma);
    if (result.flow) report.flow_distances.push_back(flow_distance_l1(*result.flow, flow));
    report.levels.push_back(std::move(level));
    result.u = std::move(solved->u);
    result.flow = std::move(flow);
    warm = &result.u;
  }
  report.completed = report.levels.size() == ladder.size();
  return result;
}

}  // namespace lagstokes
