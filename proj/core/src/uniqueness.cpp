#include <algorithm>
#include <cmath>
#include <limits>

#include "lagstokes/analysis.hpp"

namespace lagstokes {

namespace {

double l2_gap(const VectorField& a, const VectorField& b) {
  const std::size_t size = a.grid().size();
  double sum = 0.0;
  for (int c = 0; c < a.grid().dim(); ++c) {
    const auto x = a.component(c);
    const auto y = b.component(c);
    for (std::size_t i = 0; i < size; ++i) sum += (x[i] - y[i]) * (x[i] - y[i]);
  }
  return std::sqrt(sum / static_cast<double>(size));
}

double ratio(double base, double refined) {
  if (refined == 0.0) return base == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return base / refined;
}

std::vector<double> extend(std::vector<double> ladder) {
  ladder.push_back(0.5 * ladder.back());
  return ladder;
}

}  // namespace

UniquenessSeries compare_paths(const VelocityHistory& u1, const VelocityHistory& u2,
                               const std::vector<double>& s_values, double dt) {
  UniquenessSeries series;
  series.times = u1.times;
  const auto family = weighted_flow(u1, u2, s_values, dt);
  for (std::size_t k = 0; k < u1.size(); ++k) {
    series.u_l2_gap.push_back(l2_gap(u1.fields[k], u2.fields[k]));
    series.alpha.push_back(alpha(family, k));
    series.sup_gap = std::max(series.sup_gap, series.u_l2_gap.back());
    series.sup_alpha = std::max(series.sup_alpha, series.alpha.back());
  }
  return series;
}

UniquenessReport uniqueness_experiment(const ScalarHistory& sigma, const UniquenessConfig& cfg) {
  if (cfg.ladder_a.empty() || cfg.ladder_b.empty()) throw_invalid_input("both reconstruction ladders need a level");
  UniquenessReport report;
  report.s_values = cfg.s_values;

  auto a = delta_continuation(sigma, cfg.ladder_a, cfg.eulerian);
  auto b = delta_continuation(sigma, cfg.ladder_b, cfg.eulerian);
  report.path_a = a.report;
  report.path_b = b.report;
  if (!a.report.completed || !b.report.completed) return report;
  report.base = compare_paths(a.u, b.u, cfg.s_values, cfg.eulerian.dt);

  auto a2 = delta_continuation(sigma, extend(cfg.ladder_a), cfg.eulerian);
  auto b2 = delta_continuation(sigma, extend(cfg.ladder_b), cfg.eulerian);
  if (!a2.report.completed || !b2.report.completed) return report;
  report.refined = compare_paths(a2.u, b2.u, cfg.s_values, cfg.eulerian.dt);

  report.gap_ratio = ratio(report.base.sup_gap, report.refined.sup_gap);
  report.alpha_ratio = ratio(report.base.sup_alpha, report.refined.sup_alpha);
  if (report.base.sup_gap == 0.0) {
    report.verdict = Verdict::Inconclusive;
  } else {
    report.verdict = report.gap_ratio >= 2.0 && report.alpha_ratio >= 2.0 ? Verdict::Pass : Verdict::Fail;
  }
  return report;
}

}  // namespace lagstokes
