#include "lagstokes_cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "lagstokes/error.hpp"

namespace lagstokes::cli {

namespace {

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorKind::InvalidConfiguration, message);
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Keys with their defaults. An empty default marks a key that some modes
// require.
const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> table{
      {"mode", ""},
      {"d", ""},
      {"n", ""},
      {"pressure", ""},
      {"gamma", "1.4"},
      {"vdw_a", "3"},
      {"vdw_b", "0.3333333333333333"},
      {"vdw_theta", "2.4"},
      {"virial", "1, -0.5, 0.2"},
      {"osc_exponent", "2"},
      {"rho_bar", "1"},
      {"c1", "1"},
      {"c2", "1"},
      {"rho0", ""},
      {"rho0_value", "1"},
      {"rho0_low", "0.5"},
      {"rho0_high", "1.5"},
      {"rho0_amplitude", "1"},
      {"rho0_file", ""},
      {"T", ""},
      {"tau", "0.05"},
      {"picard_tol", "1e-8"},
      {"picard_max", "200"},
      {"quad_nodes", "5"},
      {"adapt_tau", "true"},
      {"dt", "0.01"},
      {"fp_tol", "1e-9"},
      {"fp_max_iter", "60"},
      {"fp_window", "0"},
      {"max_halvings", "5"},
      {"delta_ladder", "0.1, 0.05, 0.025, 0.0125"},
      {"ladder_a", "0.1, 0.05, 0.025"},
      {"ladder_b", "0.1, 0.05, 0.025, 0.0125"},
      {"s_values", "0, 0.25, 0.5, 0.75, 1"},
      {"rho_max", "100"},
      {"n_samples", "256"},
      {"bmo_level", "-1"},
      {"bmo_field", "sigma"},
      {"out", "lagstokes-out"},
      {"workers", "1"},
      {"seed", "0"},
      {"dump_velocity", "false"},
      {"dump_flow", "false"},
      {"snapshot_stride", "0"},
  };
  return table;
}

double parse_real(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    config_error("key '" + key + "': expected a real number, got '" + text + "'");
  }
  return value;
}

long long parse_integer(const std::string& key, const std::string& text) {
  long long value = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) config_error("key '" + key + "': expected an integer, got '" + text + "'");
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  config_error("key '" + key + "': expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
  if (out.empty()) config_error("key '" + key + "': expected a comma-separated list");
  return out;
}

Mode parse_mode(const std::string& text) {
  static const std::map<std::string, Mode> modes{{"lagrangian", Mode::Lagrangian}, {"eulerian", Mode::Eulerian},
                                                 {"uniqueness", Mode::Uniqueness}, {"pressure-check", Mode::PressureCheck},
                                                 {"bmo", Mode::Bmo},               {"full", Mode::Full}};
  const auto it = modes.find(text);
  if (it == modes.end()) {
    config_error("key 'mode': unknown mode '" + text +
                 "' (expected lagrangian, eulerian, uniqueness, pressure-check, bmo or full)");
  }
  return it->second;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) config_error("key '" + key + "': " + what);
}

void require_decreasing(const std::string& key, const std::vector<double>& ladder) {
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    require(ladder[i] > 0.0, key, "entries must be positive");
    require(i == 0 || ladder[i] < ladder[i - 1], key, "entries must decrease strictly");
  }
}

}  // namespace

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::Lagrangian: return "lagrangian";
    case Mode::Eulerian: return "eulerian";
    case Mode::Uniqueness: return "uniqueness";
    case Mode::PressureCheck: return "pressure-check";
    case Mode::Bmo: return "bmo";
    case Mode::Full: return "full";
  }
  return "lagrangian";
}

int edit_distance(const std::string& a, const std::string& b) {
  std::vector<int> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    int diagonal = row[0];
    row[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const int above = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diagonal + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diagonal = above;
    }
  }
  return row[b.size()];
}

std::vector<std::string> known_keys() {
  std::vector<std::string> keys;
  for (const auto& [key, value] : defaults()) keys.push_back(key);
  return keys;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read config file " + path.string());
  std::map<std::string, std::string> entries;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      config_error(path.string() + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) config_error(path.string() + ":" + std::to_string(number) + ": empty key");
    if (!entries.emplace(key, value).second) {
      config_error(path.string() + ":" + std::to_string(number) + ": key '" + key + "' given twice");
    }
  }
  return entries;
}

RunConfig resolve_config(const std::map<std::string, std::string>& file_entries, const FlagOverrides& flags) {
  RunConfig cfg;
  const auto& table = defaults();

  std::vector<std::string> unknown;
  for (const auto* source : {&file_entries, &flags.values}) {
    for (const auto& [key, value] : *source) {
      if (table.count(key) != 0) continue;
      std::string message = "'" + key + "'";
      for (const auto& candidate : known_keys()) {
        if (edit_distance(key, candidate) == 1) {
          message += " (did you mean '" + candidate + "'?)";
          break;
        }
      }
      unknown.push_back(message);
    }
  }
  if (!unknown.empty()) {
    std::string message = "unknown configuration keys:";
    for (const auto& u : unknown) message += " " + u;
    config_error(message);
  }

  std::map<std::string, std::string> values = table;
  for (const auto& [key, value] : file_entries) values[key] = value;
  for (const auto& [key, value] : flags.values) {
    if (const auto it = file_entries.find(key); it != file_entries.end() && it->second != value) {
      cfg.warnings.push_back("flag overrides config value for '" + key + "': '" + it->second + "' -> '" + value + "'");
    }
    values[key] = value;
  }

  auto text = [&](const std::string& key) -> const std::string& { return values.at(key); };
  auto real = [&](const std::string& key) { return parse_real(key, text(key)); };
  auto integer = [&](const std::string& key) { return parse_integer(key, text(key)); };

  require(!text("mode").empty(), "mode", "missing required key");
  cfg.mode = parse_mode(text("mode"));
  const bool needs_run = cfg.mode != Mode::PressureCheck;
  std::vector<std::string> required{"pressure"};
  if (needs_run) required.insert(required.end(), {"d", "n", "rho0", "T"});
  std::vector<std::string> missing;
  for (const auto& key : required) {
    if (text(key).empty()) missing.push_back(key);
  }
  if (!missing.empty()) {
    std::string message = "missing required keys for mode " + text("mode") + ":";
    for (const auto& m : missing) message += " '" + m + "'";
    config_error(message);
  }
  // Placeholders so the resolved echo and the typed parse below stay total.
  for (const auto& [key, fallback] : {std::pair<const char*, const char*>{"d", "1"}, {"n", "256"},
                                      {"rho0", "two-value"}, {"T", "1"}}) {
    if (values[key].empty()) values[key] = fallback;
  }

  cfg.dim = static_cast<int>(integer("d"));
  require(cfg.dim == 1 || cfg.dim == 2, "d", "must be 1 or 2");
  cfg.n = static_cast<int>(integer("n"));
  require(cfg.n >= 8 && (cfg.n & (cfg.n - 1)) == 0, "n", "must be a power of two >= 8");

  auto& p = cfg.pressure;
  p.name = text("pressure");
  const auto& names = builtin_pressure_names();
  require(std::find(names.begin(), names.end(), p.name) != names.end(), "pressure",
          "unknown law '" + p.name + "'");
  p.gamma = real("gamma");
  require(p.gamma > 0.0, "gamma", "must be positive");
  p.vdw_a = real("vdw_a");
  require(p.vdw_a >= 0.0, "vdw_a", "must be nonnegative");
  p.vdw_b = real("vdw_b");
  require(p.vdw_b > 0.0, "vdw_b", "must be positive");
  p.vdw_theta = real("vdw_theta");
  require(p.vdw_theta > 0.0, "vdw_theta", "must be positive");
  p.virial = parse_list("virial", text("virial"));
  p.osc_exponent = real("osc_exponent");
  require(p.osc_exponent >= 1.0, "osc_exponent", "must be >= 1");
  p.rho_bar = real("rho_bar");
  require(p.rho_bar >= 0.0, "rho_bar", "must be nonnegative");
  p.c1 = real("c1");
  p.c2 = real("c2");

  auto& r = cfg.rho0;
  r.profile = text("rho0");
  static const std::set<std::string> profiles{"constant", "two-value", "indicator", "cosine-bump", "random", "file"};
  require(profiles.count(r.profile) != 0, "rho0", "unknown profile '" + r.profile + "'");
  r.value = real("rho0_value");
  require(r.value >= 0.0, "rho0_value", "must be nonnegative");
  r.low = real("rho0_low");
  require(r.low >= 0.0, "rho0_low", "must be nonnegative");
  r.high = real("rho0_high");
  require(r.high >= 0.0, "rho0_high", "must be nonnegative");
  r.amplitude = real("rho0_amplitude");
  require(std::abs(r.amplitude) <= 1.0, "rho0_amplitude", "must lie in [-1, 1] to keep the density nonnegative");
  r.file = text("rho0_file");
  require(r.profile != "file" || !r.file.empty(), "rho0_file", "required by rho0 = file");

  auto& lag = cfg.lagrangian;
  lag.final_time = real("T");
  require(lag.final_time > 0.0, "T", "must be positive");
  lag.window = real("tau");
  require(lag.window > 0.0, "tau", "must be positive");
  lag.picard_tol = real("picard_tol");
  require(lag.picard_tol > 0.0, "picard_tol", "must be positive");
  lag.picard_max = static_cast<int>(integer("picard_max"));
  require(lag.picard_max >= 1, "picard_max", "must be at least 1");
  lag.quad_nodes_per_window = static_cast<int>(integer("quad_nodes"));
  require(lag.quad_nodes_per_window >= 2, "quad_nodes", "must be at least 2");
  lag.adapt_window = parse_bool("adapt_tau", text("adapt_tau"));

  auto& eu = cfg.eulerian;
  eu.dt = real("dt");
  require(eu.dt > 0.0, "dt", "must be positive");
  eu.tol = real("fp_tol");
  require(eu.tol > 0.0, "fp_tol", "must be positive");
  eu.max_iter = static_cast<int>(integer("fp_max_iter"));
  require(eu.max_iter >= 1, "fp_max_iter", "must be at least 1");
  eu.window = real("fp_window");
  require(eu.window >= 0.0, "fp_window", "must be nonnegative (0 selects the heuristic)");
  eu.max_halvings = static_cast<int>(integer("max_halvings"));
  require(eu.max_halvings >= 0, "max_halvings", "must be nonnegative");

  cfg.delta_ladder = parse_list("delta_ladder", text("delta_ladder"));
  require_decreasing("delta_ladder", cfg.delta_ladder);
  cfg.ladder_a = parse_list("ladder_a", text("ladder_a"));
  require_decreasing("ladder_a", cfg.ladder_a);
  cfg.ladder_b = parse_list("ladder_b", text("ladder_b"));
  require_decreasing("ladder_b", cfg.ladder_b);
  cfg.s_values = parse_list("s_values", text("s_values"));
  require(cfg.s_values.size() >= 2, "s_values", "needs at least two entries");
  for (std::size_t i = 0; i < cfg.s_values.size(); ++i) {
    require(cfg.s_values[i] >= 0.0 && cfg.s_values[i] <= 1.0, "s_values", "entries must lie in [0, 1]");
    require(i == 0 || cfg.s_values[i] > cfg.s_values[i - 1], "s_values", "entries must increase strictly");
  }

  cfg.rho_max = real("rho_max");
  require(cfg.rho_max > p.rho_bar, "rho_max", "must exceed rho_bar");
  cfg.n_samples = static_cast<int>(integer("n_samples"));
  require(cfg.n_samples >= 16, "n_samples", "must be at least 16");
  cfg.bmo_level = static_cast<int>(integer("bmo_level"));
  require(cfg.bmo_level >= -1, "bmo_level", "must be -1 (deepest) or a level >= 0");
  cfg.bmo_field = text("bmo_field");
  require(cfg.bmo_field == "sigma" || cfg.bmo_field == "eta" || cfg.bmo_field == "rho0", "bmo_field",
          "must be sigma, eta or rho0");

  cfg.out = text("out");
  require(!cfg.out.empty(), "out", "must not be empty");
  cfg.workers = static_cast<int>(integer("workers"));
  require(cfg.workers >= 1, "workers", "must be at least 1");
  const long long seed = integer("seed");
  require(seed >= 0, "seed", "must be nonnegative");
  cfg.seed = static_cast<unsigned long long>(seed);
  cfg.dump_velocity = parse_bool("dump_velocity", text("dump_velocity"));
  cfg.dump_flow = parse_bool("dump_flow", text("dump_flow"));
  cfg.snapshot_stride = static_cast<int>(integer("snapshot_stride"));
  require(cfg.snapshot_stride >= 0, "snapshot_stride", "must be nonnegative");

  cfg.resolved = values;
  return cfg;
}

}  // namespace lagstokes::cli
