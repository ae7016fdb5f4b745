#include "lagstokes/torus_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lagstokes/error.hpp"

namespace lagstokes {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::InvalidConfiguration: return "invalid-configuration";
    case ErrorKind::NoContraction: return "no-contraction";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::BoundViolation: return "bound-violation";
    case ErrorKind::UnboundedSearch: return "unbounded-search";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

void throw_invalid_input(const std::string& message) {
  throw Error(ErrorKind::InvalidInput, message);
}

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw_invalid_input(std::string(what) + " contains a non-finite value");
  }
}

}  // namespace

TorusGrid::TorusGrid(int dim, int n) : dim_(dim), n_(n) {
  if (dim != 1 && dim != 2) throw_invalid_input("grid dimension must be 1 or 2, got " + std::to_string(dim));
  if (n < 8 || !is_power_of_two(n)) {
    throw_invalid_input("points per axis must be a power of two >= 8, got " + std::to_string(n));
  }
  size_ = dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
}

Point TorusGrid::node(std::size_t index) const noexcept {
  const double h = spacing();
  if (dim_ == 1) return {static_cast<double>(index) * h, 0.0};
  const auto n = static_cast<std::size_t>(n_);
  return {static_cast<double>(index / n) * h, static_cast<double>(index % n) * h};
}

std::size_t TorusGrid::index(int i, int j) const noexcept {
  if (dim_ == 1) return static_cast<std::size_t>(i);
  return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
}

ScalarField::ScalarField(const TorusGrid& grid) : grid_(grid), values_(grid.size(), 0.0) {}

ScalarField::ScalarField(const TorusGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw_invalid_input("scalar field has " + std::to_string(values_.size()) + " values, grid needs " +
                        std::to_string(grid_.size()));
  }
  require_finite(values_, "scalar field");
}

ScalarField ScalarField::constant(const TorusGrid& grid, double value) {
  return ScalarField(grid, std::vector<double>(grid.size(), value));
}

ScalarField ScalarField::from_function(const TorusGrid& grid,
                                       const std::function<double(const Point&)>& f) {
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = f(grid.node(i));
  return ScalarField(grid, std::move(values));
}

VectorField::VectorField(const TorusGrid& grid)
    : grid_(grid), components_(static_cast<std::size_t>(grid.dim()), std::vector<double>(grid.size(), 0.0)) {}

VectorField::VectorField(const TorusGrid& grid, std::vector<std::vector<double>> components)
    : grid_(grid), components_(std::move(components)) {
  if (components_.size() != static_cast<std::size_t>(grid_.dim())) {
    throw_invalid_input("vector field needs one component per dimension");
  }
  for (const auto& c : components_) {
    if (c.size() != grid_.size()) throw_invalid_input("vector field component has wrong size");
    require_finite(c, "vector field");
  }
}

ScalarField VectorField::component_field(int c) const { return ScalarField(grid_, components_[c]); }

Point VectorField::at(std::size_t i) const noexcept {
  Point p{0.0, 0.0};
  for (int c = 0; c < grid_.dim(); ++c) p[c] = components_[c][i];
  return p;
}

double wrap(double x) {
  if (!std::isfinite(x)) throw_invalid_input("cannot wrap a non-finite coordinate");
  double r = x - std::floor(x);
  // x slightly below an integer can round up to exactly 1.
  if (r >= 1.0) r = 0.0;
  return r;
}

Point wrap(const Point& x, int dim) {
  Point r{0.0, 0.0};
  for (int c = 0; c < dim; ++c) r[c] = wrap(x[c]);
  return r;
}

namespace {

struct CellWeights {
  int lo;
  int hi;
  double frac;
};

CellWeights locate(double x, int n) {
  const double s = wrap(x) * n;
  int lo = static_cast<int>(std::floor(s));
  lo = std::clamp(lo, 0, n - 1);
  return {lo, (lo + 1) % n, s - lo};
}

double interpolate_values(std::span<const double> v, const TorusGrid& grid, const Point& x) {
  const int n = grid.n();
  const CellWeights a = locate(x[0], n);
  if (grid.dim() == 1) return (1.0 - a.frac) * v[a.lo] + a.frac * v[a.hi];
  const CellWeights b = locate(x[1], n);
  const double f00 = v[grid.index(a.lo, b.lo)];
  const double f01 = v[grid.index(a.lo, b.hi)];
  const double f10 = v[grid.index(a.hi, b.lo)];
  const double f11 = v[grid.index(a.hi, b.hi)];
  return (1.0 - a.frac) * ((1.0 - b.frac) * f00 + b.frac * f01) +
         a.frac * ((1.0 - b.frac) * f10 + b.frac * f11);
}

}  // namespace

double interpolate(const ScalarField& f, const Point& x) {
  return interpolate_values(f.values(), f.grid(), x);
}

Point interpolate(const VectorField& f, const Point& x) {
  Point r{0.0, 0.0};
  for (int c = 0; c < f.grid().dim(); ++c) r[c] = interpolate_values(f.component(c), f.grid(), x);
  return r;
}

double mean(const ScalarField& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return sum / static_cast<double>(f.size());
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double l2_norm(const ScalarField& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v * v;
  return std::sqrt(sum / static_cast<double>(f.size()));
}

ScalarField linear_combination(double a, const ScalarField& f, double b, const ScalarField& g) {
  if (!(f.grid() == g.grid())) throw_invalid_input("fields live on different grids");
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * f[i] + b * g[i];
  return ScalarField(f.grid(), std::move(out));
}

Point torus_difference(const Point& a, const Point& b, int dim) {
  Point d{0.0, 0.0};
  for (int c = 0; c < dim; ++c) {
    double delta = a[c] - b[c];
    delta -= std::round(delta);
    d[c] = delta;
  }
  return d;
}

double torus_distance(const Point& a, const Point& b, int dim) {
  const Point d = torus_difference(a, b, dim);
  return std::sqrt(d[0] * d[0] + d[1] * d[1]);
}

}  // namespace lagstokes
