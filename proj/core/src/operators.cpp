#include "kflow/operators.hpp"

#include <cmath>
#include <numbers>

#include "kflow/error.hpp"
#include "kflow/spectral.hpp"

namespace kflow {
namespace {

std::vector<double> rows_of(const TorusGrid& g, const std::function<double(double)>& f) {
  std::vector<double> v(g.ny());
  for (int iy = 0; iy < g.ny(); ++iy) v[iy] = f(g.y(iy));
  return v;
}

}  // namespace

void check_compatible(const BaseFlow& flow, const TorusGrid& grid) {
  if (flow.kind() == FlowKind::KolmogorovBar || flow.kind() == FlowKind::Dipole) {
    if (flow.alpha() && std::abs(*flow.alpha() - grid.alpha()) > 1e-14) {
      throw ValidationError("flow alpha " + std::to_string(*flow.alpha()) +
                            " does not match grid alpha " + std::to_string(grid.alpha()));
    }
    return;
  }
  const auto& d = flow.domain();
  if (d.kind != Domain::Kind::Torus || std::abs(d.length() - 2.0 * std::numbers::pi) > 1e-12) {
    throw ValidationError("spectral operators need a 2pi-periodic shear profile (torus domain)");
  }
}

std::vector<double> kernel_at_rows(const BaseFlow& flow, const TorusGrid& grid) {
  auto k = rows_of(grid, [&](double y) { return flow.kernel(y); });
  for (int iy = 0; iy < grid.ny(); ++iy) {
    if (!(k[iy] > 0.0) || !std::isfinite(k[iy])) {
      throw DomainError("kernel K is not positive at y = " + std::to_string(grid.y(iy)) +
                        "; flows must be in class K+ (or class 1)");
    }
  }
  return k;
}

SpectralField apply_L(const BaseFlow& flow, const SpectralField& omega) {
  check_compatible(flow, omega.grid());
  const SpectralField psi = poisson_solve(omega);
  switch (flow.kind()) {
    case FlowKind::KolmogorovBar:
    case FlowKind::Dipole:
      return omega - psi;
    case FlowKind::ShearKPlus:
    case FlowKind::ShearNoInflection: {
      auto k = kernel_at_rows(flow, omega.grid());
      for (auto& v : k) v = 1.0 / v;
      SpectralField out = multiply_by_rows(omega, k);
      if (flow.class_one()) {
        out += psi;
      } else {
        out -= psi;
      }
      out.zero_mean();
      return out;
    }
  }
  return omega;
}

SpectralField apply_J(const BaseFlow& flow, const SpectralField& f) {
  check_compatible(flow, f.grid());
  const auto& g = f.grid();
  SpectralField out(g);
  switch (flow.kind()) {
    case FlowKind::KolmogorovBar:
      out = multiply_by_rows(dx(f), rows_of(g, [](double y) { return -std::sin(y); }));
      break;
    case FlowKind::Dipole: {
      out = multiply_by_rows(dx(f), rows_of(g, [](double y) { return std::sin(y); }));
      const auto sinx = SpectralField::from_function(g, [](double x, double) { return std::sin(x); });
      out -= multiply_dealiased(sinx, dy(f));
      break;
    }
    case FlowKind::ShearKPlus:
    case FlowKind::ShearNoInflection: {
      auto d2 = rows_of(g, flow.profile().d2u);
      if (flow.class_one()) {
        for (auto& v : d2) v = -v;
      }
      out = multiply_by_rows(dx(f), d2);
      break;
    }
  }
  out.zero_mean();
  return out;
}

NormBundle norms(const BaseFlow& flow, const SpectralField& omega) {
  NormBundle n;
  const double l2sq = norm_l2_sq(omega);
  const double gradsq = norm_grad_sq(omega);
  n.l2 = std::sqrt(l2sq);
  n.h1 = std::sqrt(l2sq + gradsq);
  n.inner_l = inner(apply_L(flow, omega), omega).real();
  n.inner_x1 = gradsq - l2sq;
  if (n.inner_l >= 0.0) n.x = std::sqrt(n.inner_l);
  if (n.inner_x1 >= 0.0) n.x1 = std::sqrt(n.inner_x1);
  n.indefinite = n.inner_l < 0.0 || n.inner_x1 < 0.0;
  if (flow.kind() == FlowKind::KolmogorovBar || flow.kind() == FlowKind::Dipole) {
    n.weighted_l2 = n.l2;
  } else {
    const auto& g = omega.grid();
    const auto k = kernel_at_rows(flow, g);
    const auto p = omega.to_physical();
    double s = 0.0;
    for (int iy = 0; iy < g.ny(); ++iy) {
      for (int ix = 0; ix < g.nx(); ++ix) {
        s += std::norm(p[static_cast<std::size_t>(iy) * g.nx() + ix]) / k[iy];
      }
    }
    n.weighted_l2 = std::sqrt(s * g.dx() * g.dy());
  }
  return n;
}

}  // namespace kflow
