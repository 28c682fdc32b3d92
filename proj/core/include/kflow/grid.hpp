#pragma once

#include <cstddef>
#include <optional>

namespace kflow {

/// Collocation grid on T_alpha = [0, 2pi/alpha) x [0, 2pi).
///
/// Arrays are stored row-major, ny rows of nx columns; flat index
/// iy * nx + ix. Spectral arrays use the same layout in FFT order, so column
/// ix holds integer x-mode k = ix for ix < nx/2 and ix - nx otherwise.
class TorusGrid {
 public:
  TorusGrid(double alpha, int nx, int ny);

  double alpha() const { return alpha_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }

  double lx() const;
  double ly() const;
  double area() const { return lx() * ly(); }
  double dx() const { return lx() / nx_; }
  double dy() const { return ly() / ny_; }
  double x(int ix) const { return ix * dx(); }
  double y(int iy) const { return iy * dy(); }

  /// Integer Fourier indices of column ix / row iy.
  int k_of(int ix) const { return ix < nx_ / 2 ? ix : ix - nx_; }
  int m_of(int iy) const { return iy < ny_ / 2 ? iy : iy - ny_; }
  /// Physical x-wavenumber alpha * k.
  double kx(int ix) const { return alpha_ * k_of(ix); }
  double ky(int iy) const { return m_of(iy); }
  /// Symbol of -Laplacian, kx^2 + ky^2.
  double laplace_symbol(int ix, int iy) const;

  /// Flat index of mode (k, m) if representable on this grid.
  std::optional<std::size_t> index_of(int k, int m) const;

  /// Largest retained |k| and |m| under the 2/3 truncation rule.
  int kmax_dealiased() const { return (nx_ - 1) / 3; }
  int mmax_dealiased() const { return (ny_ - 1) / 3; }
  bool retained(int ix, int iy) const;

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

 private:
  double alpha_;
  int nx_;
  int ny_;
};

TorusGrid make_grid(double alpha, int nx, int ny);

}  // namespace kflow
