#pragma once

#include <deque>
#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "lagstokes/error.hpp"
#include "lagstokes/torus_grid.hpp"
#include "lagstokes_cli/config.hpp"

namespace lagstokes::cli {

enum ExitStatus : int { kOk = 0, kConfigOrIo = 1, kNoContraction = 2, kInvariantViolation = 3 };

int exit_status_for(ErrorKind kind);

/// Initial density on the configured grid. Throws InvalidConfiguration for
/// a file whose grid does not match.
ScalarField make_initial_density(const RunConfig& cfg);

/// Ordered key-value blocks written as
///
///   [block]
///   key = value
///
/// The [files] inventory and [timings] block are appended at write time.
class Manifest {
 public:
  using Block = std::vector<std::pair<std::string, std::string>>;

  Block& block(const std::string& name);
  void add_file(const std::filesystem::path& relative);
  void add_timing(const std::string& phase, double seconds);

  /// Writes manifest.txt in `dir` through a temporary file and rename.
  void write(const std::filesystem::path& dir) const;

 private:
  std::deque<std::pair<std::string, Block>> blocks_;  // deque: block references stay valid
  std::vector<std::filesystem::path> files_;
  Block timings_;
};

/// CRC-32 of a file's bytes.
std::uint32_t file_crc32(const std::filesystem::path& path);

/// Executes the configured mode, writing outputs and manifest.txt to
/// cfg.out. Returns the process exit status; progress goes to `log`.
int run(const RunConfig& cfg, std::ostream& log);

}  // namespace lagstokes::cli
