#include "kflow/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "kflow/error.hpp"

namespace kflow {
namespace {

template <class Fn>
SpectralField apply_symbol(const SpectralField& f, Fn symbol) {
  SpectralField out(f.grid());
  const auto& g = f.grid();
  for (int iy = 0; iy < g.ny(); ++iy) {
    for (int ix = 0; ix < g.nx(); ++ix) {
      const auto i = static_cast<std::size_t>(iy) * g.nx() + ix;
      out[i] = symbol(ix, iy) * f[i];
    }
  }
  return out;
}

double coeff_norm(const SpectralField& f) {
  double s = 0.0;
  for (const auto& c : f.coeffs()) s += std::norm(c);
  return std::sqrt(s);
}

}  // namespace

SpectralField dx(const SpectralField& f) {
  const auto& g = f.grid();
  // The Nyquist column has no well-defined real derivative; zero it.
  return apply_symbol(f, [&](int ix, int) {
    return ix == g.nx() / 2 ? cplx{} : cplx(0.0, g.kx(ix));
  });
}

SpectralField dy(const SpectralField& f) {
  const auto& g = f.grid();
  return apply_symbol(f, [&](int, int iy) {
    return iy == g.ny() / 2 ? cplx{} : cplx(0.0, g.ky(iy));
  });
}

SpectralField laplacian(const SpectralField& f) {
  const auto& g = f.grid();
  return apply_symbol(f, [&](int ix, int iy) { return cplx(-g.laplace_symbol(ix, iy)); });
}

SpectralField inverse_neg_laplacian(const SpectralField& f) {
  const auto& g = f.grid();
  return apply_symbol(f, [&](int ix, int iy) {
    if (ix == 0 && iy == 0) return cplx{};
    return cplx(1.0 / g.laplace_symbol(ix, iy));
  });
}

SpectralField poisson_solve(const SpectralField& omega) {
  const double scale = coeff_norm(omega);
  if (std::abs(omega.mean()) > 1e-12 * std::max(scale, 1e-300)) {
    throw ValidationError("poisson_solve: vorticity must have zero mean");
  }
  return inverse_neg_laplacian(omega);
}

VelocityField velocity_from_vorticity(const SpectralField& omega) {
  const SpectralField psi = poisson_solve(omega);
  return {dy(psi), -dx(psi)};
}

SpectralField multiply_dealiased(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid())) throw ValidationError("multiply: grid mismatch");
  auto pa = a.to_physical();
  const auto pb = b.to_physical();
  for (std::size_t i = 0; i < pa.size(); ++i) pa[i] *= pb[i];
  SpectralField out = SpectralField::from_physical(a.grid(), std::span<const cplx>(pa));
  out.dealias();
  return out;
}

SpectralField multiply_by_rows(const SpectralField& f, std::span<const double> row_values) {
  const auto& g = f.grid();
  if (row_values.size() != static_cast<std::size_t>(g.ny())) {
    throw ValidationError("multiply_by_rows: expected one value per grid row");
  }
  auto p = f.to_physical();
  for (int iy = 0; iy < g.ny(); ++iy) {
    for (int ix = 0; ix < g.nx(); ++ix) p[static_cast<std::size_t>(iy) * g.nx() + ix] *= row_values[iy];
  }
  SpectralField out = SpectralField::from_physical(g, std::span<const cplx>(p));
  out.dealias();
  return out;
}

cplx inner(const SpectralField& f, const SpectralField& g) {
  if (!(f.grid() == g.grid())) throw ValidationError("inner: grid mismatch");
  cplx s{};
  for (std::size_t i = 0; i < f.coeffs().size(); ++i) s += f[i] * std::conj(g[i]);
  return f.grid().area() * s;
}

double norm_l2_sq(const SpectralField& f) {
  double s = 0.0;
  for (const auto& c : f.coeffs()) s += std::norm(c);
  return f.grid().area() * s;
}

double norm_l2(const SpectralField& f) { return std::sqrt(norm_l2_sq(f)); }

double norm_grad_sq(const SpectralField& f) {
  const auto& g = f.grid();
  double s = 0.0;
  for (int iy = 0; iy < g.ny(); ++iy) {
    for (int ix = 0; ix < g.nx(); ++ix) {
      s += g.laplace_symbol(ix, iy) * std::norm(f[static_cast<std::size_t>(iy) * g.nx() + ix]);
    }
  }
  return g.area() * s;
}

double norm_h1_sq(const SpectralField& f) { return norm_l2_sq(f) + norm_grad_sq(f); }

double norm_l2_sq_quadrature(const SpectralField& f) {
  const auto p = f.to_physical();
  double s = 0.0;
  for (const auto& z : p) s += std::norm(z);
  return s * f.grid().dx() * f.grid().dy();
}

VelocityBounds velocity_bounds(const VelocityField& vel) {
  VelocityBounds b;
  for (const auto& z : vel.u.to_physical()) b.max_u = std::max(b.max_u, std::abs(z));
  for (const auto& z : vel.v.to_physical()) b.max_v = std::max(b.max_v, std::abs(z));
  return b;
}

}  // namespace kflow
