#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lagstokes/analysis.hpp"
#include "lagstokes/eulerian.hpp"
#include "lagstokes/lagrangian.hpp"
#include "lagstokes/pressure.hpp"

namespace lagstokes::cli {

enum class Mode { Lagrangian, Eulerian, Uniqueness, PressureCheck, Bmo, Full };
const char* to_string(Mode mode);

struct InitialDensity {
  std::string profile = "two-value";  // constant, two-value, indicator, cosine-bump, random, file
  double value = 1.0;
  double low = 0.5;
  double high = 1.5;
  double amplitude = 1.0;
  std::filesystem::path file;
};

struct RunConfig {
  Mode mode = Mode::Lagrangian;
  int dim = 1;
  int n = 256;
  PressureSpec pressure;
  InitialDensity rho0;
  LagrangianRunConfig lagrangian;
  EulerianConfig eulerian;
  std::vector<double> delta_ladder = {0.1, 0.05, 0.025, 0.0125};
  std::vector<double> ladder_a = {0.1, 0.05, 0.025};
  std::vector<double> ladder_b = {0.1, 0.05, 0.025, 0.0125};
  std::vector<double> s_values = {0.0, 0.25, 0.5, 0.75, 1.0};
  double rho_max = 100.0;
  int n_samples = 256;
  int bmo_level = -1;  // -1: deepest admissible level
  std::string bmo_field = "sigma";
  std::filesystem::path out = "lagstokes-out";
  int workers = 1;
  unsigned long long seed = 0;
  bool dump_velocity = false;
  bool dump_flow = false;
  int snapshot_stride = 0;  // 0: first and last state only

  /// Every key with its resolved textual value, for the manifest.
  std::map<std::string, std::string> resolved;
  std::vector<std::string> warnings;
};

/// Raw `key = value` pairs in file order. `#` starts a comment. Throws
/// Error(Io) when the file cannot be read and Error(InvalidConfiguration) on
/// malformed lines or repeated keys.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Command-line overrides; values are textual like file entries.
struct FlagOverrides {
  std::map<std::string, std::string> values;
};

/// Merges file entries and flags (flags win, with a warning on conflict),
/// fills defaults and validates. Throws Error(InvalidConfiguration) naming
/// the offending keys; unknown keys get an edit-distance-1 suggestion.
RunConfig resolve_config(const std::map<std::string, std::string>& file_entries, const FlagOverrides& flags);

/// Known configuration keys, sorted.
std::vector<std::string> known_keys();

/// Levenshtein distance, used for key suggestions.
int edit_distance(const std::string& a, const std::string& b);

}  // namespace lagstokes::cli
