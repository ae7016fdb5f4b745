#include "lagstokes_cli/app.hpp"

#include <boost/crc.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "lagstokes/analysis.hpp"
#include "lagstokes/eulerian.hpp"
#include "lagstokes/field_io.hpp"
#include "lagstokes/flow.hpp"
#include "lagstokes/lagrangian.hpp"
#include "lagstokes/parallel.hpp"
#include "lagstokes/pressure.hpp"

namespace lagstokes::cli {

namespace fs = std::filesystem;

int exit_status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoContraction: return kNoContraction;
    case ErrorKind::BoundViolation:
    case ErrorKind::Divergence: return kInvariantViolation;
    case ErrorKind::InvalidInput:
    case ErrorKind::InvalidConfiguration:
    case ErrorKind::UnboundedSearch:
    case ErrorKind::Io: return kConfigOrIo;
  }
  return kConfigOrIo;
}

ScalarField make_initial_density(const RunConfig& cfg) {
  const TorusGrid grid(cfg.dim, cfg.n);
  const auto& r = cfg.rho0;
  if (r.profile == "constant") return ScalarField::constant(grid, r.value);
  if (r.profile == "two-value") {
    return ScalarField::from_function(grid, [&](const Point& x) { return x[0] < 0.5 ? r.low : r.high; });
  }
  if (r.profile == "indicator") {
    return ScalarField::from_function(grid, [&](const Point& x) {
      return x[0] < 0.5 && (grid.dim() == 1 || x[1] < 0.5) ? r.value : 0.0;
    });
  }
  if (r.profile == "cosine-bump") {
    return ScalarField::from_function(grid, [&](const Point& x) {
      double shape = std::cos(2.0 * std::numbers::pi * x[0]);
      if (grid.dim() == 2) shape *= std::cos(2.0 * std::numbers::pi * x[1]);
      return r.value * (1.0 + r.amplitude * shape);
    });
  }
  if (r.profile == "random") {
    std::mt19937_64 engine(cfg.seed);
    std::uniform_real_distribution<double> dist(std::min(r.low, r.high), std::max(r.low, r.high));
    std::vector<double> values(grid.size());
    for (double& v : values) v = dist(engine);
    return ScalarField(grid, std::move(values));
  }
  const FieldSnapshot snap = read_snapshot(r.file);
  if (snap.dim != cfg.dim || snap.n != cfg.n) {
    throw Error(ErrorKind::InvalidConfiguration, "rho0_file grid (" + std::to_string(snap.dim) + ", " +
                                                     std::to_string(snap.n) + ") does not match d and n");
  }
  ScalarField field = snap.to_field();
  for (double v : field.values()) {
    if (v < 0.0) throw Error(ErrorKind::InvalidConfiguration, "rho0_file contains negative densities");
  }
  return field;
}

Manifest::Block& Manifest::block(const std::string& name) {
  for (auto& [key, block] : blocks_) {
    if (key == name) return block;
  }
  blocks_.emplace_back(name, Block{});
  return blocks_.back().second;
}

void Manifest::add_file(const fs::path& relative) { files_.push_back(relative); }

void Manifest::add_timing(const std::string& phase, double seconds) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << seconds;
  timings_.emplace_back(phase, s.str());
}

std::uint32_t file_crc32(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  boost::crc_32_type crc;
  char buffer[1 << 14];
  while (in) {
    in.read(buffer, sizeof buffer);
    crc.process_bytes(buffer, static_cast<std::size_t>(in.gcount()));
  }
  return crc.checksum();
}

void Manifest::write(const fs::path& dir) const {
  std::ostringstream out;
  for (const auto& [name, block] : blocks_) {
    out << '[' << name << "]\n";
    for (const auto& [key, value] : block) out << key << " = " << value << '\n';
    out << '\n';
  }
  out << "[files]\n";
  for (const auto& rel : files_) {
    const fs::path full = dir / rel;
    char crc[16];
    std::snprintf(crc, sizeof crc, "%08x", file_crc32(full));
    out << rel.generic_string() << " = crc32:" << crc << " bytes:" << fs::file_size(full) << '\n';
  }
  out << "\n[timings]\n";
  for (const auto& [key, value] : timings_) out << key << " = " << value << '\n';

  const fs::path tmp = dir / "manifest.txt.tmp";
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    file << out.str();
    if (!file) throw Error(ErrorKind::Io, "failed writing " + tmp.string());
  }
  fs::rename(tmp, dir / "manifest.txt");
}

namespace {

std::string real(double v) { return format_real(v); }

std::string list(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? ", " : "") + format_real(values[i]);
  return s;
}

std::string index_name(const std::string& stem, std::size_t k) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%s_%05zu.txt", stem.c_str(), k);
  return buffer;
}

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

struct Series {
  std::vector<double> times;
  std::vector<double> energy;
  std::optional<UniquenessSeries> uniqueness;
};

void write_series(const fs::path& path, const Series& s) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << "t,energy,u_l2_gap,alpha\n";
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    out << real(s.times[k]) << ',' << (k < s.energy.size() ? real(s.energy[k]) : "") << ',';
    if (s.uniqueness && k < s.uniqueness->u_l2_gap.size()) {
      out << real(s.uniqueness->u_l2_gap[k]) << ',' << real(s.uniqueness->alpha[k]);
    } else {
      out << ',';
    }
    out << '\n';
  }
}

void report_condition_p(Manifest::Block& b, const ConditionPReport& r, double rho_max) {
  b.emplace_back("rho_max", real(rho_max));
  b.emplace_back("samples", std::to_string(r.rho_samples.size()));
  b.emplace_back("c_lower", real(r.c_lower));
  b.emplace_back("c_estimate", real(r.c_estimate));
  b.emplace_back("quartile_max", list(r.quartile_max));
  b.emplace_back("verdict", to_string(r.verdict));
}

void report_lagrangian(Manifest::Block& b, const LagrangianReport& r, std::size_t states) {
  b.emplace_back("M", real(r.M));
  b.emplace_back("r", real(r.r));
  b.emplace_back("sup_eta", real(r.sup_eta));
  b.emplace_back("tau_initial", real(r.tau_initial));
  b.emplace_back("tau_final", real(r.tau_final));
  b.emplace_back("c_estimate", real(r.c_estimate));
  b.emplace_back("lipschitz_on_r", real(r.lipschitz_on_r));
  b.emplace_back("conservation_defect", real(r.conservation_defect));
  b.emplace_back("windows", std::to_string(r.windows.size()));
  b.emplace_back("states", std::to_string(states));
  int max_outer = 0;
  int total_inner = 0;
  double max_residual = 0.0;
  for (const auto& w : r.windows) {
    max_outer = std::max(max_outer, w.outer_iterations);
    total_inner += w.inner_iterations;
    max_residual = std::max(max_residual, w.residual);
  }
  b.emplace_back("max_outer_iterations", std::to_string(max_outer));
  b.emplace_back("total_inner_iterations", std::to_string(total_inner));
  b.emplace_back("max_window_residual", real(max_residual));
}

void report_reconstruction(Manifest::Block& b, const ReconstructionReport& r) {
  b.emplace_back("ladder", list(r.ladder));
  b.emplace_back("completed", r.completed ? "true" : "false");
  if (!r.failure.empty()) b.emplace_back("failure", r.failure);
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const auto& l = r.levels[i];
    const std::string p = "level" + std::to_string(i) + ".";
    b.emplace_back(p + "delta", real(l.delta));
    b.emplace_back(p + "window", real(l.window));
    b.emplace_back(p + "halvings", std::to_string(l.halvings));
    b.emplace_back(p + "iterations", std::to_string(l.iterations));
    b.emplace_back(p + "last_window_residuals", list(l.last_window_residuals));
    b.emplace_back(p + "reconstruction_residual", real(l.reconstruction_residual));
    b.emplace_back(p + "limit_residual", real(l.limit_residual));
    b.emplace_back(p + "discarded_mean", real(l.discarded_mean));
  }
  b.emplace_back("flow_distances", list(r.flow_distances));
}

void collect(std::vector<std::string>& into, const std::vector<std::string>& from) {
  into.insert(into.end(), from.begin(), from.end());
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& log) {
  set_worker_count(cfg.workers);
  fs::create_directories(cfg.out);
  Manifest manifest;
  auto& run_block = manifest.block("run");
  run_block.emplace_back("mode", to_string(cfg.mode));
  auto& config_block = manifest.block("config");
  for (const auto& [key, value] : cfg.resolved) {
    if (key != "out") config_block.emplace_back(key, value);
  }
  std::vector<std::string> warnings = cfg.warnings;
  Stopwatch clock;
  int status = kOk;
  std::string error_kind;
  std::string error_message;
  const Mode mode = cfg.mode;
  auto wants = [mode](std::initializer_list<Mode> modes) {
    return std::find(modes.begin(), modes.end(), mode) != modes.end();
  };

  try {
    const PressureLaw law = make_pressure_law(cfg.pressure);
    collect(warnings, law.warnings);

    if (wants({Mode::PressureCheck, Mode::Full})) {
      log << "checking pressure law " << law.name << '\n';
      const auto report = check_condition_p(law, cfg.rho_max, cfg.n_samples);
      report_condition_p(manifest.block("condition_p"), report, cfg.rho_max);
      manifest.add_timing("condition_p", clock.lap());
    }

    if (mode != Mode::PressureCheck) {
      const ScalarField rho0 = make_initial_density(cfg);
      log << "lagrangian run to T = " << cfg.lagrangian.final_time << '\n';
      const LagrangianResult lag = run_lagrangian(rho0, law, cfg.lagrangian);
      report_lagrangian(manifest.block("lagrangian"), lag.report, lag.states.size());
      collect(warnings, lag.report.warnings);
      manifest.add_timing("lagrangian", clock.lap());

      const auto balance = energy_balance_report(lag, law);
      auto& eb = manifest.block("energy");
      eb.emplace_back("initial", real(balance.energy.front()));
      eb.emplace_back("final", real(balance.energy.back()));
      eb.emplace_back("total_dissipation", real(balance.total_dissipation));
      eb.emplace_back("max_ledger_entry", real(balance.max_violation));
      eb.emplace_back("max_increase", real(balance.max_increase));
      eb.emplace_back("tolerance", real(balance.tolerance));
      eb.emplace_back("ok", balance.ok ? "true" : "false");
      manifest.add_timing("energy", clock.lap());

      fs::create_directories(cfg.out / "snapshots");
      const std::size_t last = lag.states.size() - 1;
      for (std::size_t k = 0; k <= last; ++k) {
        const bool keep = k == 0 || k == last || (cfg.snapshot_stride > 0 && k % cfg.snapshot_stride == 0);
        if (!keep) continue;
        const auto& s = lag.states[k];
        for (const auto& [name, field] : {std::pair<const char*, const ScalarField*>{"eta", &s.eta},
                                          {"sigma", &s.sigma},
                                          {"accum", &s.accum}}) {
          const fs::path rel = fs::path("snapshots") / index_name(name, k);
          write_snapshot(cfg.out / rel, *field, s.time, name);
          manifest.add_file(rel);
        }
      }

      Series series;
      series.times = balance.times;
      series.energy = balance.energy;

      ScalarHistory sigma;
      for (const auto& s : lag.states) {
        sigma.times.push_back(s.time);
        sigma.fields.push_back(s.sigma);
      }

      if (wants({Mode::Eulerian, Mode::Full})) {
        log << "reconstructing velocity along " << cfg.delta_ladder.size() << " mollifier levels\n";
        const auto rec = delta_continuation(sigma, cfg.delta_ladder, cfg.eulerian);
        report_reconstruction(manifest.block("reconstruction"), rec.report);
        collect(warnings, rec.report.warnings);
        manifest.add_timing("reconstruction", clock.lap());
        if (rec.flow && (cfg.dump_velocity || cfg.dump_flow)) {
          if (cfg.dump_velocity) fs::create_directories(cfg.out / "velocity");
          if (cfg.dump_flow) fs::create_directories(cfg.out / "flow");
          FlowMap flow = *rec.flow;
          ScalarHistory divu;
          divu.times = rec.u.times;
          for (const auto& u : rec.u.fields) divu.fields.push_back(divergence_spectral(u));
          jacobian_liouville(flow, divu);
          const TorusGrid& grid = flow.grid;
          for (std::size_t k = 0; k < rec.u.size(); ++k) {
            const double t = rec.u.times[k];
            if (cfg.dump_velocity) {
              for (int c = 0; c < grid.dim(); ++c) {
                const std::string name = "u" + std::to_string(c);
                const fs::path rel = fs::path("velocity") / index_name(name, k);
                write_snapshot(cfg.out / rel, grid, t, name, rec.u.fields[k].component(c));
                manifest.add_file(rel);
              }
            }
            if (cfg.dump_flow) {
              for (int c = 0; c < grid.dim(); ++c) {
                std::vector<double> x(grid.size());
                std::vector<int> w(grid.size());
                for (std::size_t i = 0; i < grid.size(); ++i) {
                  x[i] = flow.positions[k][i][static_cast<std::size_t>(c)];
                  w[i] = flow.winding[k][i][static_cast<std::size_t>(c)];
                }
                const std::string xn = "x" + std::to_string(c);
                const std::string wn = "w" + std::to_string(c);
                write_snapshot(cfg.out / "flow" / index_name(xn, k), grid, t, xn, std::span<const double>(x));
                write_snapshot(cfg.out / "flow" / index_name(wn, k), grid, t, wn, std::span<const int>(w));
                manifest.add_file(fs::path("flow") / index_name(xn, k));
                manifest.add_file(fs::path("flow") / index_name(wn, k));
              }
              write_snapshot(cfg.out / "flow" / index_name("jac", k), grid, t, "jac",
                             std::span<const double>(flow.jac[k]));
              manifest.add_file(fs::path("flow") / index_name("jac", k));
            }
          }
          manifest.block("reconstruction").emplace_back("flow_L", real(flow.L));
          manifest.add_timing("dumps", clock.lap());
        }
        if (!rec.report.completed) {
          status = kNoContraction;
          error_kind = to_string(ErrorKind::NoContraction);
          error_message = rec.report.failure;
        }
      }

      if (status == kOk && wants({Mode::Uniqueness, Mode::Full})) {
        log << "uniqueness experiment\n";
        UniquenessConfig ucfg;
        ucfg.ladder_a = cfg.ladder_a;
        ucfg.ladder_b = cfg.ladder_b;
        ucfg.s_values = cfg.s_values;
        ucfg.eulerian = cfg.eulerian;
        const auto uniq = uniqueness_experiment(sigma, ucfg);
        auto& ub = manifest.block("uniqueness");
        ub.emplace_back("ladder_a", list(cfg.ladder_a));
        ub.emplace_back("ladder_b", list(cfg.ladder_b));
        ub.emplace_back("s_values", list(uniq.s_values));
        ub.emplace_back("sup_gap", real(uniq.base.sup_gap));
        ub.emplace_back("sup_alpha", real(uniq.base.sup_alpha));
        ub.emplace_back("refined_sup_gap", real(uniq.refined.sup_gap));
        ub.emplace_back("refined_sup_alpha", real(uniq.refined.sup_alpha));
        ub.emplace_back("gap_ratio", real(uniq.gap_ratio));
        ub.emplace_back("alpha_ratio", real(uniq.alpha_ratio));
        ub.emplace_back("alpha_at_zero", uniq.base.alpha.empty() ? "" : real(uniq.base.alpha.front()));
        ub.emplace_back("verdict", to_string(uniq.verdict));
        collect(warnings, uniq.path_a.warnings);
        collect(warnings, uniq.path_b.warnings);
        if (!uniq.path_a.completed || !uniq.path_b.completed) {
          status = kNoContraction;
          error_kind = to_string(ErrorKind::NoContraction);
          error_message = !uniq.path_a.failure.empty() ? uniq.path_a.failure : uniq.path_b.failure;
        } else {
          series.uniqueness = uniq.base;
        }
        manifest.add_timing("uniqueness", clock.lap());
      }

      if (status == kOk && wants({Mode::Bmo, Mode::Full})) {
        const auto& final_state = lag.states.back();
        const ScalarField& field = cfg.bmo_field == "eta"   ? final_state.eta
                                   : cfg.bmo_field == "rho0" ? final_state.rho0
                                                             : final_state.sigma;
        const int deepest = static_cast<int>(std::lround(std::log2(cfg.n))) - 1;
        const int level = cfg.bmo_level < 0 ? deepest : std::min(cfg.bmo_level, deepest);
        const auto bmo = bmo_seminorm(field, level);
        auto& bb = manifest.block("bmo");
        bb.emplace_back("field", cfg.bmo_field);
        bb.emplace_back("max_level", std::to_string(level));
        bb.emplace_back("seminorm", real(bmo.seminorm));
        bb.emplace_back("worst_level", std::to_string(bmo.worst.level));
        bb.emplace_back("worst_offset", std::to_string(bmo.worst.offset[0]) + ", " + std::to_string(bmo.worst.offset[1]));
        bb.emplace_back("exp_integral", real(bmo.exp_integral));
        bb.emplace_back("note", bmo.note);
        if (bmo.seminorm > 0.0) {
          const auto fit = john_nirenberg_check(bmo);
          bb.emplace_back("jn_c1", real(fit.c1));
          bb.emplace_back("jn_c2", real(fit.c2));
          bb.emplace_back("jn_verdict", to_string(fit.verdict));
          const double m = mean(final_state.rho0);
          std::vector<double> g(field.size());
          for (std::size_t i = 0; i < g.size(); ++i) g[i] = final_state.rho0[i] - m;
          bb.emplace_back("log_inequality_ratio",
                          real(log_inequality_ratio(field, bmo.seminorm, ScalarField(field.grid(), g), 4.0)));
        } else {
          bb.emplace_back("jn_verdict", "not applicable: constant field");
        }
        manifest.add_timing("bmo", clock.lap());
      }

      write_series(cfg.out / "series.csv", series);
      manifest.add_file("series.csv");
    }
  } catch (const Error& e) {
    status = exit_status_for(e.kind());
    error_kind = to_string(e.kind());
    error_message = e.what();
  } catch (const std::exception& e) {
    status = kConfigOrIo;
    error_kind = "internal";
    error_message = e.what();
  }

  run_block.emplace_back("status", status == kOk ? "ok" : "error");
  run_block.emplace_back("exit_code", std::to_string(status));
  run_block.emplace_back("workers", std::to_string(cfg.workers));
  if (status != kOk) {
    auto& eb = manifest.block("error");
    eb.emplace_back("kind", error_kind);
    eb.emplace_back("message", error_message);
    log << "error (" << error_kind << "): " << error_message << '\n';
  }
  auto& wb = manifest.block("warnings");
  for (std::size_t i = 0; i < warnings.size(); ++i) wb.emplace_back("w" + std::to_string(i), warnings[i]);
  manifest.write(cfg.out);
  return status;
}

}  // namespace lagstokes::cli
