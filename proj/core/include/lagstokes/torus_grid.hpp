#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace lagstokes {

/// A point on (or lifted from) the unit torus. Only the first `dim`
/// components are meaningful; the rest stay zero.
using Point = std::array<double, 2>;

/// Uniform periodic grid on the unit torus [0,1)^d, d in {1,2}.
///
/// Nodes sit at i*h per axis with h = 1/n. Flat indices are row-major:
/// node (i, j) lives at i*n + j, where i indexes axis 0.
class TorusGrid {
 public:
  /// Throws InvalidInput unless dim is 1 or 2 and n >= 8 is a power of two.
  TorusGrid(int dim, int n);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  double spacing() const noexcept { return 1.0 / n_; }
  std::size_t size() const noexcept { return size_; }

  Point node(std::size_t index) const noexcept;
  std::size_t index(int i, int j = 0) const noexcept;

  bool operator==(const TorusGrid&) const = default;

 private:
  int dim_;
  int n_;
  std::size_t size_;
};

/// Grid function with one finite real value per node.
class ScalarField {
 public:
  explicit ScalarField(const TorusGrid& grid);
  /// Throws InvalidInput on size mismatch or non-finite entries.
  ScalarField(const TorusGrid& grid, std::vector<double> values);

  static ScalarField constant(const TorusGrid& grid, double value);
  static ScalarField from_function(const TorusGrid& grid,
                                   const std::function<double(const Point&)>& f);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  TorusGrid grid_;
  std::vector<double> values_;
};

/// Grid function with a d-vector per node, stored component-major.
class VectorField {
 public:
  explicit VectorField(const TorusGrid& grid);
  /// components.size() must equal grid.dim(); throws InvalidInput otherwise.
  VectorField(const TorusGrid& grid, std::vector<std::vector<double>> components);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::span<const double> component(int c) const noexcept { return components_[c]; }
  ScalarField component_field(int c) const;
  Point at(std::size_t i) const noexcept;

 private:
  TorusGrid grid_;
  std::vector<std::vector<double>> components_;
};

/// x mod 1, mapped into [0,1). Throws InvalidInput on non-finite input.
double wrap(double x);
Point wrap(const Point& x, int dim);

/// Periodic multilinear interpolation.
double interpolate(const ScalarField& f, const Point& x);
Point interpolate(const VectorField& f, const Point& x);

/// Node average, i.e. the rectangle rule on the unit torus.
double mean(const ScalarField& f);
double max_abs(const ScalarField& f);
/// Root-mean-square over nodes (grid L^2 norm with |T^d| = 1).
double l2_norm(const ScalarField& f);

ScalarField linear_combination(double a, const ScalarField& f, double b, const ScalarField& g);

/// Shortest displacement from b to a on the torus, componentwise in [-1/2, 1/2].
Point torus_difference(const Point& a, const Point& b, int dim);
double torus_distance(const Point& a, const Point& b, int dim);

}  // namespace lagstokes
