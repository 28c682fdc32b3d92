#include "kflow/grid.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include "kflow/error.hpp"

namespace kflow {

TorusGrid::TorusGrid(double alpha, int nx, int ny) : alpha_(alpha), nx_(nx), ny_(ny) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ValidationError("grid: alpha must be positive, got " + std::to_string(alpha));
  }
  if (nx < 4 || ny < 4 || nx % 2 != 0 || ny % 2 != 0) {
    throw ValidationError("grid: nx and ny must be even and >= 4, got " + std::to_string(nx) +
                          " x " + std::to_string(ny));
  }
}

double TorusGrid::lx() const { return 2.0 * std::numbers::pi / alpha_; }
double TorusGrid::ly() const { return 2.0 * std::numbers::pi; }

double TorusGrid::laplace_symbol(int ix, int iy) const {
  const double a = kx(ix);
  const double b = ky(iy);
  return a * a + b * b;
}

std::optional<std::size_t> TorusGrid::index_of(int k, int m) const {
  if (k < -nx_ / 2 || k >= nx_ / 2 || m < -ny_ / 2 || m >= ny_ / 2) return std::nullopt;
  const int ix = k >= 0 ? k : k + nx_;
  const int iy = m >= 0 ? m : m + ny_;
  return static_cast<std::size_t>(iy) * nx_ + ix;
}

bool TorusGrid::retained(int ix, int iy) const {
  return std::abs(k_of(ix)) <= kmax_dealiased() && std::abs(m_of(iy)) <= mmax_dealiased();
}

TorusGrid make_grid(double alpha, int nx, int ny) { return TorusGrid(alpha, nx, ny); }

}  // namespace kflow
