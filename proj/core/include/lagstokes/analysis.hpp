#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "lagstokes/eulerian.hpp"
#include "lagstokes/flow.hpp"
#include "lagstokes/lagrangian.hpp"
#include "lagstokes/pressure.hpp"
#include "lagstokes/torus_grid.hpp"

namespace lagstokes {

/// mean_y P(eta) e^A, the energy in label coordinates.
double energy(const LagrangianState& state, const PressureLaw& law, double c = 1.0);
/// mean_x P(rho).
double energy(const ScalarField& rho, const PressureLaw& law, double c = 1.0);

struct EnergyBalanceReport {
  std::vector<double> times;         // window boundaries
  std::vector<double> energy;        // E at each boundary
  std::vector<double> entries;       // E(t_k+1) - E(t_k) + dissipation_k, one per window
  std::vector<double> increments;    // E(t_k+1) - E(t_k)
  double max_violation = 0.0;        // max(0, max entry)
  double max_increase = 0.0;         // max(0, max increment)
  double total_dissipation = 0.0;
  double tolerance = 0.0;            // 1e-6 (1 + E(0))
  bool ok = true;
};

EnergyBalanceReport energy_balance_report(const LagrangianResult& run, const PressureLaw& law);

struct Cube {
  int level = 0;
  std::array<int, 2> offset{0, 0};  // lower corner in grid cells
  int side = 0;                     // side in grid cells
};

struct BmoReport {
  double seminorm = 0.0;
  std::vector<int> cube_levels;
  Cube worst;
  std::size_t cube_cells = 0;  // grid cells in the worst cube
  std::vector<std::pair<double, double>> jn_curve;  // (lambda, measure fraction of |f - avg| > lambda)
  double exp_integral = 0.0;
  std::string note = "grid-level lower bound of the continuum seminorm";
};

/// Mean oscillation over cubes of side 2^-l, l = 0..max_level, with corners
/// on a lattice of half the cube side. Throws InvalidInput when max_level
/// exceeds log2(n) - 1.
BmoReport bmo_seminorm(const ScalarField& f, int max_level);

/// Same quantity over every interval of every length (d = 1 only). Quadratic
/// in n.
double bmo_bruteforce_1d(const ScalarField& f);

struct JohnNirenbergFit {
  double c1 = 0.0;
  double c2 = 0.0;
  double exp_integral = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

/// Least-squares fit log(fraction) = log c1 - c2 lambda / seminorm over the
/// curve. Zero fractions count as 1/(2 N_Q). Throws InvalidInput when the
/// seminorm is zero.
JohnNirenbergFit john_nirenberg_check(const BmoReport& report);

/// |mean(f g)| divided by |f|_BMO |g|_1 (|ln|g|_1| + ln(e + |g|_q)
/// + (1 + |ln|g|_1|) |g|_q^((q-2)/2)). Reported, not bounded a priori.
double log_inequality_ratio(const ScalarField& f, double f_seminorm, const ScalarField& g, double q);

struct UniquenessConfig {
  std::vector<double> ladder_a = {0.1, 0.05, 0.025};
  std::vector<double> ladder_b = {0.1, 0.05, 0.025, 0.0125};
  std::vector<double> s_values = {0.0, 0.25, 0.5, 0.75, 1.0};
  EulerianConfig eulerian;
};

struct UniquenessSeries {
  std::vector<double> times;
  std::vector<double> u_l2_gap;
  std::vector<double> alpha;
  double sup_gap = 0.0;
  double sup_alpha = 0.0;
};

struct UniquenessReport {
  std::vector<double> s_values;
  UniquenessSeries base;
  UniquenessSeries refined;   // both ladders extended by one halving
  double gap_ratio = 0.0;     // base.sup_gap / refined.sup_gap
  double alpha_ratio = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  ReconstructionReport path_a;
  ReconstructionReport path_b;
};

/// Two reconstructions of the same sigma history and their comparison.
UniquenessSeries compare_paths(const VelocityHistory& u1, const VelocityHistory& u2,
                               const std::vector<double>& s_values, double dt);

/// Reconstructs sigma along both ladders, then along both ladders extended
/// by one halving. Pass when both sup gap and sup alpha shrink by at least 2.
UniquenessReport uniqueness_experiment(const ScalarHistory& sigma, const UniquenessConfig& cfg);

}  // namespace lagstokes
