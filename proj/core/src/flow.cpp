#include "lagstokes/flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lagstokes/parallel.hpp"

namespace lagstokes {

template <class Field>
void validate_history(const FieldHistory<Field>& history) {
  if (history.times.empty()) throw_invalid_input("history has no time nodes");
  if (history.times.size() != history.fields.size()) throw_invalid_input("history times and fields differ in count");
  for (std::size_t k = 1; k < history.times.size(); ++k) {
    if (!(history.times[k] > history.times[k - 1])) throw_invalid_input("history times must increase strictly");
    if (!(history.fields[k].grid() == history.fields[0].grid())) throw_invalid_input("history fields on different grids");
  }
}

template void validate_history(const FieldHistory<VectorField>&);
template void validate_history(const FieldHistory<ScalarField>&);

namespace {

Point add_scaled(const Point& a, double s, const Point& b) { return {a[0] + s * b[0], a[1] + s * b[1]}; }

std::size_t segment_of(const std::vector<double>& times, double t) {
  if (times.size() < 2) return 0;
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - times.begin()) - 1));
  return std::min(k, times.size() - 2);
}

// Velocity at time t, assuming t lies in segment k (or the history has one node).
Point velocity_in_segment(const VelocityHistory& u, std::size_t k, double t, const Point& x) {
  if (u.size() == 1) return interpolate(u.fields[0], x);
  const double t0 = u.times[k];
  const double t1 = u.times[k + 1];
  const double w = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
  const Point a = interpolate(u.fields[k], x);
  if (w == 0.0) return a;
  const Point b = interpolate(u.fields[k + 1], x);
  return {(1.0 - w) * a[0] + w * b[0], (1.0 - w) * a[1] + w * b[1]};
}

Point rk4_step(const VelocityHistory& u, std::size_t k, double t, const Point& z, double h) {
  const Point k1 = velocity_in_segment(u, k, t, z);
  const Point k2 = velocity_in_segment(u, k, t + 0.5 * h, add_scaled(z, 0.5 * h, k1));
  const Point k3 = velocity_in_segment(u, k, t + 0.5 * h, add_scaled(z, 0.5 * h, k2));
  const Point k4 = velocity_in_segment(u, k, t + h, add_scaled(z, h, k3));
  return {z[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
          z[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

// Integrates z from time `from` to time `to` (either direction) inside segment k.
Point advance(const VelocityHistory& u, std::size_t k, double from, double to, Point z, double dt) {
  const double span = to - from;
  if (span == 0.0) return z;
  const auto steps = static_cast<long>(std::max(1.0, std::ceil(std::abs(span) / dt - 1e-9)));
  const double h = span / static_cast<double>(steps);
  for (long m = 0; m < steps; ++m) z = rk4_step(u, k, from + static_cast<double>(m) * h, z, h);
  return z;
}

void store(const Point& z, int dim, Point& wrapped, std::array<int, 2>& winding) {
  wrapped = {0.0, 0.0};
  winding = {0, 0};
  for (int c = 0; c < dim; ++c) {
    if (!std::isfinite(z[c])) throw_invalid_input("trajectory left the finite range");
    double w = std::floor(z[c]);
    double r = z[c] - w;
    if (r >= 1.0) {
      r = 0.0;
      w += 1.0;
    }
    wrapped[c] = r;
    winding[c] = static_cast<int>(w);
  }
}

void require_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw_invalid_input("flow step dt must be positive");
}

}  // namespace

Point evaluate(const VelocityHistory& u, double t, const Point& x) {
  const double tc = std::clamp(t, u.times.front(), u.times.back());
  return velocity_in_segment(u, segment_of(u.times, tc), tc, x);
}

Point FlowMap::lifted(std::size_t k, std::size_t label) const noexcept {
  const Point& p = positions[k][label];
  const auto& w = winding[k][label];
  return {p[0] + w[0], p[1] + w[1]};
}

FlowMap integrate_flow(const VelocityHistory& u, double dt) {
  validate_history(u);
  require_dt(dt);
  const TorusGrid grid = u.grid();
  const std::size_t labels = grid.size();
  const std::size_t nodes = u.size();
  FlowMap flow{grid, u.times, {}, {}, {}, 0.0};
  flow.positions.assign(nodes, std::vector<Point>(labels));
  flow.winding.assign(nodes, std::vector<std::array<int, 2>>(labels));
  flow.jac.assign(nodes, std::vector<double>(labels, 1.0));
  const int dim = grid.dim();

  parallel_for(labels, [&](std::size_t i) {
    Point z = grid.node(i);
    flow.positions[0][i] = z;
    flow.winding[0][i] = {0, 0};
    for (std::size_t k = 0; k + 1 < nodes; ++k) {
      z = advance(u, k, u.times[k], u.times[k + 1], z, dt);
      store(z, dim, flow.positions[k + 1][i], flow.winding[k + 1][i]);
    }
  });
  return flow;
}

void jacobian_liouville(FlowMap& flow, const ScalarHistory& divu) {
  validate_history(divu);
  if (divu.times != flow.times) throw_invalid_input("divergence history must share the flow's time nodes");
  if (!(divu.grid() == flow.grid)) throw_invalid_input("divergence history lives on a different grid");
  const std::size_t nodes = flow.times.size();
  const std::size_t labels = flow.grid.size();

  std::vector<double> sup(nodes);
  for (std::size_t k = 0; k < nodes; ++k) sup[k] = max_abs(divu.fields[k]);
  flow.L = 0.0;
  for (std::size_t k = 0; k + 1 < nodes; ++k) {
    flow.L += (flow.times[k + 1] - flow.times[k]) * std::max(sup[k], sup[k + 1]);
  }

  parallel_for(labels, [&](std::size_t i) {
    double log_j = 0.0;
    double g_prev = interpolate(divu.fields[0], flow.positions[0][i]);
    flow.jac[0][i] = 1.0;
    for (std::size_t k = 1; k < nodes; ++k) {
      const double g = interpolate(divu.fields[k], flow.positions[k][i]);
      log_j += 0.5 * (flow.times[k] - flow.times[k - 1]) * (g_prev + g);
      flow.jac[k][i] = std::exp(log_j);
      g_prev = g;
    }
  });
}

std::vector<Point> inverse_flow(const VelocityHistory& u, double t, double dt, Warnings* warnings) {
  validate_history(u);
  require_dt(dt);
  const double t0 = u.times.front();
  if (!(t >= t0 && t <= u.times.back())) throw_invalid_input("inverse_flow time lies outside the history");
  const TorusGrid grid = u.grid();
  std::vector<Point> y(grid.size());
  const std::size_t top = segment_of(u.times, t);

  parallel_for(grid.size(), [&](std::size_t i) {
    Point z = grid.node(i);
    double now = t;
    for (std::size_t k = top + 1; k-- > 0;) {
      const double lo = u.size() == 1 ? t0 : u.times[k];
      if (now > lo) {
        z = advance(u, k, now, lo, z, dt);
        now = lo;
      }
      if (u.size() == 1) break;
    }
    y[i] = wrap(z, grid.dim());
  });

  if (warnings != nullptr && t > t0) {
    const double defect = inverse_flow_defect(u, t, dt, y);
    const double bound = 10.0 * dt * dt * velocity_sup(u) * velocity_lipschitz(u);
    if (defect > bound) {
      warn(warnings, "inverse flow round-trip defect " + std::to_string(defect) + " exceeds estimate " +
                         std::to_string(bound) + " at t = " + std::to_string(t));
    }
  }
  return y;
}

double inverse_flow_defect(const VelocityHistory& u, double t, double dt, const std::vector<Point>& y) {
  validate_history(u);
  require_dt(dt);
  const TorusGrid grid = u.grid();
  if (y.size() != grid.size()) throw_invalid_input("label count does not match the grid");
  std::vector<double> defect(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    Point z = y[i];
    double now = u.times.front();
    for (std::size_t k = 0; k + 1 < u.size() && now < t; ++k) {
      const double hi = std::min(t, u.times[k + 1]);
      z = advance(u, k, now, hi, z, dt);
      now = hi;
    }
    defect[i] = torus_distance(z, grid.node(i), grid.dim());
  });
  return *std::max_element(defect.begin(), defect.end());
}

VelocityHistory blend(const VelocityHistory& u1, const VelocityHistory& u2, double s) {
  validate_history(u1);
  validate_history(u2);
  if (u1.times != u2.times) throw_invalid_input("blended histories must share time nodes");
  if (!(u1.grid() == u2.grid())) throw_invalid_input("blended histories live on different grids");
  const TorusGrid grid = u1.grid();
  VelocityHistory out;
  out.times = u1.times;
  for (std::size_t k = 0; k < u1.size(); ++k) {
    std::vector<std::vector<double>> comps(static_cast<std::size_t>(grid.dim()));
    for (int c = 0; c < grid.dim(); ++c) {
      const auto a = u1.fields[k].component(c);
      const auto b = u2.fields[k].component(c);
      auto& dst = comps[static_cast<std::size_t>(c)];
      dst.resize(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) dst[i] = s * a[i] + (1.0 - s) * b[i];
    }
    out.fields.emplace_back(grid, std::move(comps));
  }
  return out;
}

WeightedFlowFamily weighted_flow(const VelocityHistory& u1, const VelocityHistory& u2,
                                 const std::vector<double>& s_values, double dt) {
  WeightedFlowFamily family;
  family.s_values = s_values;
  for (double s : s_values) {
    if (!(s >= 0.0 && s <= 1.0)) throw_invalid_input("weights s must lie in [0, 1]");
    family.flows.push_back(integrate_flow(blend(u1, u2, s), dt));
  }
  return family;
}

namespace {

void require_family(const WeightedFlowFamily& family, std::size_t k) {
  if (family.s_values.size() < 2) throw_invalid_input("need at least two s values");
  if (family.flows.size() != family.s_values.size()) throw_invalid_input("one flow per s value expected");
  for (std::size_t i = 1; i < family.s_values.size(); ++i) {
    if (!(family.s_values[i] > family.s_values[i - 1])) throw_invalid_input("s values must increase strictly");
  }
  if (k >= family.flows.front().times.size()) throw_invalid_input("time node out of range");
}

double difference_norm(const FlowMap& a, const FlowMap& b, std::size_t k, double ds) {
  const std::size_t labels = a.grid.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < labels; ++i) {
    const Point pa = a.lifted(k, i);
    const Point pb = b.lifted(k, i);
    const double dx = (pa[0] - pb[0]) / ds;
    const double dy = (pa[1] - pb[1]) / ds;
    sum += dx * dx + dy * dy;
  }
  return std::sqrt(sum / static_cast<double>(labels));
}

}  // namespace

std::vector<double> ds_derivative_norms(const WeightedFlowFamily& family, std::size_t k) {
  require_family(family, k);
  std::vector<double> out;
  const auto& s = family.s_values;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    out.push_back(difference_norm(family.flows[i + 1], family.flows[i], k, s[i + 1] - s[i]));
  }
  return out;
}

std::vector<double> ds_node_norms(const WeightedFlowFamily& family, std::size_t k) {
  require_family(family, k);
  const auto& s = family.s_values;
  const std::size_t m = s.size();
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == m ? i : i + 1;
    out[i] = difference_norm(family.flows[hi], family.flows[lo], k, s[hi] - s[lo]);
  }
  return out;
}

double alpha(const WeightedFlowFamily& family, std::size_t k) {
  const auto norms = ds_node_norms(family, k);
  const auto& s = family.s_values;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    total += 0.5 * (s[i + 1] - s[i]) * (norms[i] * norms[i] + norms[i + 1] * norms[i + 1]);
  }
  return total;
}

double flow_distance_l1(const FlowMap& f1, const FlowMap& f2) {
  if (!(f1.grid == f2.grid) || f1.times.size() != f2.times.size()) {
    throw_invalid_input("flows must share grid and time nodes");
  }
  const int dim = f1.grid.dim();
  double worst = 0.0;
  for (std::size_t k = 0; k < f1.times.size(); ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < f1.grid.size(); ++i) {
      sum += torus_distance(f1.positions[k][i], f2.positions[k][i], dim);
    }
    worst = std::max(worst, sum / static_cast<double>(f1.grid.size()));
  }
  return worst;
}

double velocity_sup(const VelocityHistory& u) {
  double sup = 0.0;
  for (const auto& f : u.fields) {
    for (std::size_t i = 0; i < f.grid().size(); ++i) {
      const Point v = f.at(i);
      sup = std::max(sup, std::sqrt(v[0] * v[0] + v[1] * v[1]));
    }
  }
  return sup;
}

double velocity_lipschitz(const VelocityHistory& u) {
  double lip = 0.0;
  for (const auto& f : u.fields) {
    const TorusGrid& g = f.grid();
    const int n = g.n();
    for (int c = 0; c < g.dim(); ++c) {
      const auto v = f.component(c);
      for (std::size_t idx = 0; idx < g.size(); ++idx) {
        const Point x = g.node(idx);
        const int i = static_cast<int>(std::lround(x[0] * n)) % n;
        const int j = static_cast<int>(std::lround(x[1] * n)) % n;
        lip = std::max(lip, std::abs(v[g.index((i + 1) % n, j)] - v[idx]) * n);
        if (g.dim() == 2) lip = std::max(lip, std::abs(v[g.index(i, (j + 1) % n)] - v[idx]) * n);
      }
    }
  }
  return lip;
}

}  // namespace lagstokes
