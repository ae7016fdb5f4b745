#include "lagstokes/field_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "lagstokes/error.hpp"

namespace lagstokes {

std::string format_real(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  return out;
}

void write_header(std::ostream& out, const TorusGrid& grid, double time, const std::string& name) {
  if (name.empty() || name.find_first_of(" \t\n") != std::string::npos) {
    throw_invalid_input("snapshot name must be a single non-empty token");
  }
  out << grid.dim() << ' ' << grid.n() << ' ' << format_real(time) << ' ' << name << '\n';
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const TorusGrid& grid, double time,
                    const std::string& name, std::span<const double> values) {
  if (values.size() != grid.size()) throw_invalid_input("snapshot value count does not match grid");
  auto out = open_for_write(path);
  write_header(out, grid, time, name);
  for (double v : values) out << format_real(v) << '\n';
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

void write_snapshot(const std::filesystem::path& path, const ScalarField& field, double time,
                    const std::string& name) {
  write_snapshot(path, field.grid(), time, name, field.values());
}

void write_snapshot(const std::filesystem::path& path, const TorusGrid& grid, double time,
                    const std::string& name, std::span<const int> values) {
  if (values.size() != grid.size()) throw_invalid_input("snapshot value count does not match grid");
  auto out = open_for_write(path);
  write_header(out, grid, time, name);
  for (int v : values) out << v << '\n';
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

FieldSnapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open snapshot " + path.string());
  FieldSnapshot snap;
  std::string header;
  if (!std::getline(in, header)) throw Error(ErrorKind::Io, "empty snapshot " + path.string());
  std::istringstream hs(header);
  if (!(hs >> snap.dim >> snap.n >> snap.time >> snap.name)) {
    throw Error(ErrorKind::Io, "malformed snapshot header in " + path.string());
  }
  const TorusGrid grid(snap.dim, snap.n);
  snap.values.reserve(grid.size());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      snap.values.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw Error(ErrorKind::Io, "malformed value '" + line + "' in " + path.string());
    }
  }
  if (snap.values.size() != grid.size()) {
    throw Error(ErrorKind::Io, "snapshot " + path.string() + " has " + std::to_string(snap.values.size()) +
                                   " values, expected " + std::to_string(grid.size()));
  }
  return snap;
}

ScalarField FieldSnapshot::to_field() const { return ScalarField(TorusGrid(dim, n), values); }

}  // namespace lagstokes
