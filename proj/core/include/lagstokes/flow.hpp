#pragma once

#include <array>
#include <vector>

#include "lagstokes/error.hpp"
#include "lagstokes/torus_grid.hpp"

namespace lagstokes {

/// Fields sampled at increasing time nodes; values between nodes are
/// linear in time.
template <class Field>
struct FieldHistory {
  std::vector<double> times;
  std::vector<Field> fields;

  std::size_t size() const noexcept { return times.size(); }
  const TorusGrid& grid() const { return fields.front().grid(); }
};

using VelocityHistory = FieldHistory<VectorField>;
using ScalarHistory = FieldHistory<ScalarField>;

/// Throws InvalidInput unless times are strictly increasing, sizes match and
/// all fields share one grid.
template <class Field>
void validate_history(const FieldHistory<Field>& history);

/// u(t, x) with multilinear interpolation in x and linear interpolation in t.
/// t is clamped to the history's time range.
Point evaluate(const VelocityHistory& u, double t, const Point& x);

/// Trajectories x(t_k, y) of every grid label y at the history's time nodes.
/// Positions are stored wrapped into [0,1)^d together with integer winding
/// counts, so `lifted` recovers a continuous trajectory.
struct FlowMap {
  TorusGrid grid;
  std::vector<double> times;
  std::vector<std::vector<Point>> positions;
  std::vector<std::vector<std::array<int, 2>>> winding;
  std::vector<std::vector<double>> jac;  // J(t_k, y); all ones until jacobian_liouville
  double L = 0.0;                        // sum_k dt_k max(|div u(t_k)|_inf, |div u(t_k+1)|_inf)

  Point lifted(std::size_t k, std::size_t label) const noexcept;
};

/// RK4 per label. Each history interval is split into ceil(gap/dt) equal
/// substeps, so dt is an upper bound on the step size.
FlowMap integrate_flow(const VelocityHistory& u, double dt);

/// Fills J(t_k, y) = exp(trapezoid of div u along x(., y)) and L. `divu` must
/// share the flow's time nodes.
void jacobian_liouville(FlowMap& flow, const ScalarHistory& divu);

/// y(t, x) for every grid node x: the label whose trajectory reaches x at
/// time t, found by integrating dz/ds = -u(t - s, z) from z = x over [0, t].
/// When `warnings` is given, the result is pushed forward again and a
/// warning is recorded if the round-trip defect exceeds
/// 10 dt^2 |u|_inf Lip(u).
std::vector<Point> inverse_flow(const VelocityHistory& u, double t, double dt, Warnings* warnings = nullptr);

/// Forward round trip |x(t, y(t, x)) - x|_inf on torus distance.
double inverse_flow_defect(const VelocityHistory& u, double t, double dt, const std::vector<Point>& y);

/// Flows of s u1 + (1 - s) u2 for every s.
struct WeightedFlowFamily {
  std::vector<double> s_values;
  std::vector<FlowMap> flows;
};

/// s-blend of two histories on the same nodes.
VelocityHistory blend(const VelocityHistory& u1, const VelocityHistory& u2, double s);

WeightedFlowFamily weighted_flow(const VelocityHistory& u1, const VelocityHistory& u2,
                                 const std::vector<double>& s_values, double dt);

/// |(x_{s_{i+1}} - x_{s_i}) / (s_{i+1} - s_i)|_2 at time node k, one per
/// adjacent pair. Uses lifted positions.
std::vector<double> ds_derivative_norms(const WeightedFlowFamily& family, std::size_t k);

/// |dx_s/ds|_2 at each s node: centered differences inside, one-sided at the
/// ends.
std::vector<double> ds_node_norms(const WeightedFlowFamily& family, std::size_t k);

/// alpha(t_k) = int_0^1 |dx_s/ds|_2^2 ds by the trapezoid rule over s nodes.
double alpha(const WeightedFlowFamily& family, std::size_t k);

/// max over time nodes of mean_y |x1(t,y) - x2(t,y)| in torus distance.
double flow_distance_l1(const FlowMap& f1, const FlowMap& f2);

/// Largest sup norm of u over the history, and the largest sampled
/// finite-difference Lipschitz constant.
double velocity_sup(const VelocityHistory& u);
double velocity_lipschitz(const VelocityHistory& u);

}  // namespace lagstokes
