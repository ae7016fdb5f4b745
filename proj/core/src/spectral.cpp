#include "lagstokes/spectral.hpp"

#include "lagstokes/error.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <utility>

namespace lagstokes::spectral {

namespace {

struct Buffer {
  explicit Buffer(std::size_t n) : data(fftw_alloc_complex(n)) {}
  ~Buffer() { fftw_free(data); }
  Buffer(const Buffer&) = delete;
  Buffer& operator=(const Buffer&) = delete;
  fftw_complex* data;
};

// Plan creation is not thread-safe in FFTW; execution on fresh aligned
// buffers with fftw_execute_dft is.
fftw_plan plan_for(int dim, int n, int sign) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(mutex);
  const auto key = std::make_tuple(dim, n, sign);
  if (auto it = plans.find(key); it != plans.end()) return it->second;
  const std::size_t size = dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
  Buffer in(size);
  Buffer out(size);
  fftw_plan plan = dim == 1 ? fftw_plan_dft_1d(n, in.data, out.data, sign, FFTW_ESTIMATE)
                            : fftw_plan_dft_2d(n, n, in.data, out.data, sign, FFTW_ESTIMATE);
  plans.emplace(key, plan);
  return plan;
}

}  // namespace

Coefficients forward(const ScalarField& f) {
  const TorusGrid& grid = f.grid();
  const std::size_t size = grid.size();
  Buffer in(size);
  Buffer out(size);
  for (std::size_t i = 0; i < size; ++i) {
    in.data[i][0] = f[i];
    in.data[i][1] = 0.0;
  }
  fftw_execute_dft(plan_for(grid.dim(), grid.n(), FFTW_FORWARD), in.data, out.data);
  Coefficients c(size);
  const double scale = 1.0 / static_cast<double>(size);
  for (std::size_t i = 0; i < size; ++i) c[i] = {out.data[i][0] * scale, out.data[i][1] * scale};
  return c;
}

ScalarField inverse(const TorusGrid& grid, Coefficients coeffs) {
  const std::size_t size = grid.size();
  if (coeffs.size() != size) throw_invalid_input("coefficient count does not match the grid");
  Buffer in(size);
  Buffer out(size);
  for (std::size_t i = 0; i < size; ++i) {
    in.data[i][0] = coeffs[i].real();
    in.data[i][1] = coeffs[i].imag();
  }
  fftw_execute_dft(plan_for(grid.dim(), grid.n(), FFTW_BACKWARD), in.data, out.data);
  std::vector<double> values(size);
  for (std::size_t i = 0; i < size; ++i) values[i] = out.data[i][0];
  return ScalarField(grid, std::move(values));
}

int wavenumber(int index, int n) { return index <= n / 2 ? index : index - n; }

std::array<int, 2> wavevector(const TorusGrid& grid, std::size_t flat) {
  const int n = grid.n();
  if (grid.dim() == 1) return {wavenumber(static_cast<int>(flat), n), 0};
  const auto nn = static_cast<std::size_t>(n);
  return {wavenumber(static_cast<int>(flat / nn), n), wavenumber(static_cast<int>(flat % nn), n)};
}

bool is_nyquist(const TorusGrid& grid, std::size_t flat, int axis) {
  const int n = grid.n();
  const auto nn = static_cast<std::size_t>(n);
  const std::size_t index = grid.dim() == 1 ? flat : (axis == 0 ? flat / nn : flat % nn);
  return static_cast<int>(index) == n / 2;
}

}  // namespace lagstokes::spectral
