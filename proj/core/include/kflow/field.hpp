#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "kflow/grid.hpp"

namespace kflow {

using cplx = std::complex<double>;

/// Fourier coefficients of a scalar on a TorusGrid.
///
/// f(x, y) = sum_{k,m} c(k, m) exp(i (alpha k x + m y)). Real fields carry
/// Hermitian-symmetric coefficients; complex single-mode fields are allowed
/// so linear operators can be checked mode by mode.
class SpectralField {
 public:
  explicit SpectralField(TorusGrid grid);
  SpectralField(TorusGrid grid, std::vector<cplx> coeffs);

  static SpectralField from_physical(TorusGrid grid, std::span<const double> values);
  static SpectralField from_physical(TorusGrid grid, std::span<const cplx> values);
  static SpectralField from_function(TorusGrid grid,
                                     const std::function<double(double, double)>& f);
  /// amplitude * exp(i (alpha k x + m y)).
  static SpectralField mode(TorusGrid grid, int k, int m, cplx amplitude = 1.0);

  const TorusGrid& grid() const { return grid_; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  std::span<cplx> coeffs() { return coeffs_; }
  cplx& operator[](std::size_t i) { return coeffs_[i]; }
  const cplx& operator[](std::size_t i) const { return coeffs_[i]; }

  /// Coefficient of mode (k, m); zero if the mode is not representable.
  cplx at(int k, int m) const;
  void set(int k, int m, cplx value);

  std::vector<cplx> to_physical() const;
  /// Real part of the physical values; callers should check is_hermitian().
  std::vector<double> to_physical_real() const;

  cplx mean() const;
  void zero_mean();
  /// Zero every coefficient outside the 2/3-rule retained set.
  void dealias();
  bool is_hermitian(double rel_tol = 1e-12) const;
  /// Replace c by (c + conj(c(-k,-m))) / 2 and drop Nyquist modes.
  void symmetrize();
  double max_abs() const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(cplx s);
  /// this += s * o
  SpectralField& axpy(cplx s, const SpectralField& o);

 private:
  void check_same_grid(const SpectralField& o) const;

  TorusGrid grid_;
  std::vector<cplx> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(cplx s, SpectralField a);
SpectralField operator-(SpectralField a);

struct VelocityField {
  SpectralField u;
  SpectralField v;
};

}  // namespace kflow
