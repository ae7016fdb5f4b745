#pragma once

#include <array>
#include <complex>
#include <vector>

#include "lagstokes/torus_grid.hpp"

namespace lagstokes::spectral {

using Coefficients = std::vector<std::complex<double>>;

/// Normalized DFT: f(x_j) = sum_k c_k exp(2 pi i k . x_j). Same layout as
/// the grid's flat indices.
Coefficients forward(const ScalarField& f);

/// Real part of the inverse transform.
ScalarField inverse(const TorusGrid& grid, Coefficients coeffs);

/// Signed wavenumber of DFT index `index` along an axis of n points.
int wavenumber(int index, int n);

/// Signed wavenumbers (k0, k1) of a flat index; k1 = 0 in one dimension.
std::array<int, 2> wavevector(const TorusGrid& grid, std::size_t flat);

/// True for modes on the Nyquist line of axis `axis`, where odd derivatives
/// are set to zero.
bool is_nyquist(const TorusGrid& grid, std::size_t flat, int axis);

}  // namespace lagstokes::spectral
