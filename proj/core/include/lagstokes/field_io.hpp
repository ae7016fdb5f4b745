#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lagstokes/torus_grid.hpp"

namespace lagstokes {

/// Plain-text field snapshot: a header line `d n time name` followed by one
/// node value per line in row-major order.
struct FieldSnapshot {
  int dim = 1;
  int n = 0;
  double time = 0.0;
  std::string name;
  std::vector<double> values;

  ScalarField to_field() const;
};

/// Shortest decimal text that round-trips the double exactly.
std::string format_real(double value);

void write_snapshot(const std::filesystem::path& path, const TorusGrid& grid, double time,
                    const std::string& name, std::span<const double> values);
void write_snapshot(const std::filesystem::path& path, const ScalarField& field, double time,
                    const std::string& name);
void write_snapshot(const std::filesystem::path& path, const TorusGrid& grid, double time,
                    const std::string& name, std::span<const int> values);

/// Throws Error(Io) if the file is missing or malformed.
FieldSnapshot read_snapshot(const std::filesystem::path& path);

}  // namespace lagstokes
