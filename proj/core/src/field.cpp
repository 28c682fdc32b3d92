#include "kflow/field.hpp"

#include <algorithm>
#include <cmath>

#include "fft.hpp"
#include "kflow/error.hpp"

namespace kflow {

SpectralField::SpectralField(TorusGrid grid) : grid_(grid), coeffs_(grid.size(), cplx{}) {}

SpectralField::SpectralField(TorusGrid grid, std::vector<cplx> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.size()) throw ValidationError("field: coefficient count mismatch");
}

SpectralField SpectralField::from_physical(TorusGrid grid, std::span<const cplx> values) {
  if (values.size() != grid.size()) throw ValidationError("field: physical sample count mismatch");
  SpectralField f(grid);
  detail::dft2d(grid.ny(), grid.nx(), values, f.coeffs_, -1);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& c : f.coeffs_) c *= scale;
  return f;
}

SpectralField SpectralField::from_physical(TorusGrid grid, std::span<const double> values) {
  std::vector<cplx> tmp(values.begin(), values.end());
  return from_physical(grid, std::span<const cplx>(tmp));
}

SpectralField SpectralField::from_function(TorusGrid grid,
                                           const std::function<double(double, double)>& f) {
  std::vector<cplx> v(grid.size());
  for (int iy = 0; iy < grid.ny(); ++iy) {
    for (int ix = 0; ix < grid.nx(); ++ix) {
      v[static_cast<std::size_t>(iy) * grid.nx() + ix] = f(grid.x(ix), grid.y(iy));
    }
  }
  return from_physical(grid, std::span<const cplx>(v));
}

SpectralField SpectralField::mode(TorusGrid grid, int k, int m, cplx amplitude) {
  SpectralField f(grid);
  f.set(k, m, amplitude);
  return f;
}

cplx SpectralField::at(int k, int m) const {
  const auto idx = grid_.index_of(k, m);
  return idx ? coeffs_[*idx] : cplx{};
}

void SpectralField::set(int k, int m, cplx value) {
  const auto idx = grid_.index_of(k, m);
  if (!idx) throw ValidationError("field: mode not representable on grid");
  coeffs_[*idx] = value;
}

std::vector<cplx> SpectralField::to_physical() const {
  std::vector<cplx> out(coeffs_.size());
  detail::dft2d(grid_.ny(), grid_.nx(), coeffs_, out, +1);
  return out;
}

std::vector<double> SpectralField::to_physical_real() const {
  const auto c = to_physical();
  std::vector<double> out(c.size());
  std::transform(c.begin(), c.end(), out.begin(), [](cplx z) { return z.real(); });
  return out;
}

cplx SpectralField::mean() const { return coeffs_[0]; }
void SpectralField::zero_mean() { coeffs_[0] = 0.0; }

void SpectralField::dealias() {
  for (int iy = 0; iy < grid_.ny(); ++iy) {
    for (int ix = 0; ix < grid_.nx(); ++ix) {
      if (!grid_.retained(ix, iy)) coeffs_[static_cast<std::size_t>(iy) * grid_.nx() + ix] = 0.0;
    }
  }
}

bool SpectralField::is_hermitian(double rel_tol) const {
  const double scale = std::max(max_abs(), 1e-300);
  for (int iy = 0; iy < grid_.ny(); ++iy) {
    for (int ix = 0; ix < grid_.nx(); ++ix) {
      const int k = grid_.k_of(ix);
      const int m = grid_.m_of(iy);
      const cplx c = coeffs_[static_cast<std::size_t>(iy) * grid_.nx() + ix];
      const auto mirror = grid_.index_of(-k, -m);
      // Nyquist rows/columns have no partner; they must be real-representable as zero.
      const cplx partner = mirror ? std::conj(coeffs_[*mirror]) : cplx{};
      if (std::abs(c - partner) > rel_tol * scale) return false;
    }
  }
  return true;
}

void SpectralField::symmetrize() {
  std::vector<cplx> out(coeffs_.size());
  for (int iy = 0; iy < grid_.ny(); ++iy) {
    for (int ix = 0; ix < grid_.nx(); ++ix) {
      const int k = grid_.k_of(ix);
      const int m = grid_.m_of(iy);
      const auto idx = static_cast<std::size_t>(iy) * grid_.nx() + ix;
      const auto mirror = grid_.index_of(-k, -m);
      out[idx] = mirror ? 0.5 * (coeffs_[idx] + std::conj(coeffs_[*mirror])) : cplx{};
    }
  }
  coeffs_ = std::move(out);
}

double SpectralField::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

void SpectralField::check_same_grid(const SpectralField& o) const {
  if (!(grid_ == o.grid_)) throw ValidationError("field: grid mismatch");
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  check_same_grid(o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  check_same_grid(o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(cplx s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField& SpectralField::axpy(cplx s, const SpectralField& o) {
  check_same_grid(o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * o.coeffs_[i];
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(cplx s, SpectralField a) { return a *= s; }
SpectralField operator-(SpectralField a) { return a *= -1.0; }

}  // namespace kflow
