#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lagstokes/error.hpp"
#include "lagstokes/flow.hpp"
#include "lagstokes/torus_grid.hpp"

namespace lagstokes {

/// Periodized Gaussian of standard deviation `delta`, sampled on the grid and
/// normalized to unit discrete mass. Its Fourier symbol is close to
/// exp(-2 pi^2 delta^2 |k|^2).
struct MollifierSpec {
  double delta = 0.05;
};

/// Periodic convolution with the sampled kernel. The result stays within
/// [min f, max f] and keeps the mean. For delta < 2h the field is returned
/// unchanged and a warning is recorded. Throws InvalidInput for delta <= 0.
ScalarField mollify(const ScalarField& f, const MollifierSpec& spec, Warnings* warnings = nullptr);
ScalarHistory mollify(const ScalarHistory& f, const MollifierSpec& spec, Warnings* warnings = nullptr);

struct PoissonSolution {
  ScalarField phi;
  double discarded_mean = 0.0;  // mean of the right-hand side, projected out
};

/// Zero-mean phi with Laplacian phi = rhs - mean(rhs).
PoissonSolution solve_poisson_periodic(const ScalarField& rhs);

/// Spectral derivatives. Odd derivatives drop the Nyquist mode.
VectorField gradient_spectral(const ScalarField& phi);
ScalarField divergence_spectral(const VectorField& u);
ScalarField laplacian_spectral(const ScalarField& f);
/// d_0 u_1 - d_1 u_0; requires a two-dimensional field.
ScalarField curl_spectral(const VectorField& u);

/// sup over components of |d_c f|_inf.
double gradient_sup(const ScalarField& f);

/// max over low probe modes of |grad Laplacian^{-1} e_k|_inf / |e_k|_inf.
double poisson_gradient_bound(const TorusGrid& grid);

struct EulerianConfig {
  double dt = 0.01;         // RK4 step bound for flows
  double tol = 1e-9;        // sup-norm change between successive u iterates
  int max_iter = 60;
  int max_halvings = 5;
  double window = 0.0;      // fixed-point window T1; 0 selects the contraction heuristic
};

/// One application of the reconstruction map: inverse flow of `ubar`, the
/// mollified sigma composed with it, then a Poisson solve and gradient at
/// every time node. `discarded_mean` (optional) receives the largest
/// projected right-hand-side mean.
VelocityHistory phi_map(const VelocityHistory& ubar, const ScalarHistory& sigma_delta, double dt,
                        double* discarded_mean = nullptr);

VelocityHistory zero_velocity(const ScalarHistory& like);

/// T1 = 0.5 / (C_e |grad sigma_delta|_inf) over the whole history; infinite
/// when sigma_delta is constant in space.
double contraction_window(const ScalarHistory& sigma_delta);

struct WindowTrace {
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<double> residuals;
};

struct FixedPointResult {
  VelocityHistory u;
  double window = 0.0;
  std::vector<WindowTrace> windows;
  int iterations = 0;
  double discarded_mean = 0.0;
};

/// Fixed point of phi_map on consecutive windows of length T1. Nodes before
/// the current window stay frozen. The initial iterate is `initial` when
/// given, otherwise phi_map(0, sigma_delta). Throws NoContractionError when a
/// window needs more than cfg.max_iter iterations.
FixedPointResult phi_fixed_point(const ScalarHistory& sigma_delta, double window, const EulerianConfig& cfg,
                                 const VelocityHistory* initial = nullptr);

/// max over time nodes of the grid L2 norm of div u(t, x(t,y)) - sigma(t,y),
/// with x the flow of u.
double reconstruction_residual(const VelocityHistory& u, const ScalarHistory& sigma, double dt);
double reconstruction_residual(const FlowMap& flow, const VelocityHistory& u, const ScalarHistory& sigma);

struct LevelReport {
  double delta = 0.0;
  double window = 0.0;
  int halvings = 0;
  int iterations = 0;
  std::vector<double> last_window_residuals;
  double reconstruction_residual = 0.0;  // against this level's mollified sigma
  double limit_residual = 0.0;           // against the unmollified sigma
  double discarded_mean = 0.0;
};

struct ReconstructionReport {
  std::vector<double> ladder;
  std::vector<LevelReport> levels;
  std::vector<double> flow_distances;  // between consecutive completed levels
  bool completed = false;
  std::string failure;
  Warnings warnings;
};

struct ReconstructionResult {
  VelocityHistory u;  // velocity of the last completed level
  std::optional<FlowMap> flow;  // its flow
  ReconstructionReport report;
};

/// Runs phi_fixed_point for each delta of a strictly decreasing ladder,
/// warm-starting from the previous level. A level that fails to contract is
/// retried with T1 halved, up to cfg.max_halvings times; after that the
/// ladder stops and the partial report is returned.
ReconstructionResult delta_continuation(const ScalarHistory& sigma, const std::vector<double>& ladder,
                                        const EulerianConfig& cfg);

}  // namespace lagstokes
