#pragma once

#include <vector>

#include "lagstokes/error.hpp"
#include "lagstokes/pressure.hpp"
#include "lagstokes/torus_grid.hpp"

namespace lagstokes {

/// Label-space state of the Lagrangian system at one instant. `accum` is
/// A(t,y) = int_0^t sigma(s,y) ds, so exp(A) is the flow Jacobian and
/// eta = rho0 * exp(-A).
struct LagrangianState {
  TorusGrid grid;
  ScalarField rho0;
  ScalarField eta;
  ScalarField sigma;
  ScalarField accum;
  double time = 0.0;
};

struct LagrangianRunConfig {
  double window = 0.05;           // requested window length tau
  double picard_tol = 1e-8;       // sup-norm tolerance of both fixed-point loops
  int picard_max = 200;
  int quad_nodes_per_window = 5;  // equispaced trapezoid nodes, endpoints included
  double final_time = 1.0;
  bool adapt_window = true;       // shrink tau to 0.5 / C_est when needed
};

struct WindowRecord {
  double t0 = 0.0;
  double t1 = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  double residual = 0.0;
  double dissipation = 0.0;        // int_window mean(sigma^2 e^A) dt
  double max_weighted_mean = 0.0;  // max of {p(eta)}_sigma over the window nodes
};

struct LagrangianReport {
  double M = 0.0;        // running sup of {p(eta)}_sigma
  double r = 0.0;        // density bound for the final M
  double sup_eta = 0.0;
  double tau_initial = 0.0;
  double tau_final = 0.0;
  double c_estimate = 0.0;
  double lipschitz_on_r = 0.0;  // sampled Lipschitz constant of p on [0, r]
  double conservation_defect = 0.0;  // max |eta e^A - rho0| over accepted states
  std::vector<WindowRecord> windows;
  Warnings warnings;
};

struct LagrangianResult {
  std::vector<LagrangianState> states;  // one per window boundary, starting at t = 0
  LagrangianReport report;
};

/// State at t = 0: eta = rho0, A = 0, sigma = p(rho0) - mean p(rho0).
LagrangianState initial_state(const ScalarField& rho0, const PressureLaw& law);

/// {p(eta)}_sigma = mean_y p(eta) e^A. Throws Divergence if A > 700 anywhere.
double weighted_mean_pressure(const ScalarField& eta, const ScalarField& accum, const PressureLaw& law);

/// Node data of one window: time nodes t_j and per-node label fields.
struct WindowTrajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> eta;
  std::vector<std::vector<double>> sigma;
  std::vector<std::vector<double>> accum;
  std::vector<double> weighted_mean;
};

/// Inner loop: for the given eta on the window nodes, iterates
/// sigma <- p(eta) - {p(eta)}_sigma with A rebuilt from sigma by the
/// trapezoid rule from `accum_start`. `trajectory.sigma` is the initial guess
/// and receives the fixed point; `trajectory.accum` and `weighted_mean` are
/// updated to match. Returns the iteration count. Throws NoContractionError.
int sigma_fixed_point(WindowTrajectory& trajectory, const std::vector<double>& accum_start,
                      const PressureLaw& law, const LagrangianRunConfig& cfg);

struct WindowStep {
  LagrangianState state;
  WindowRecord record;
  WindowTrajectory trajectory;
};

/// Advances `state` by `tau` with the outer loop eta = rho0 exp(-A) around
/// sigma_fixed_point. Throws Divergence if eta exceeds `blowup_bound`.
WindowStep step_window(const LagrangianState& state, const PressureLaw& law, const LagrangianRunConfig& cfg,
                       double tau, double blowup_bound);

/// Runs windows from t = 0 to cfg.final_time. Throws BoundViolation if
/// sup eta exceeds the density bound r.
LagrangianResult run_lagrangian(const ScalarField& rho0, const PressureLaw& law, const LagrangianRunConfig& cfg);

}  // namespace lagstokes
