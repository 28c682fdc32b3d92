#pragma once

#include <span>
#include <vector>

#include "kflow/field.hpp"

namespace kflow {

// Spectral calculus on TorusGrid fields. Derivatives are mode-exact.

SpectralField dx(const SpectralField& f);
SpectralField dy(const SpectralField& f);
SpectralField laplacian(const SpectralField& f);

/// psi with -Laplacian psi = omega; throws ValidationError if omega has a
/// nonzero mean beyond 1e-12 relative to its coefficient norm.
SpectralField poisson_solve(const SpectralField& omega);
/// (-Laplacian)^{-1} applied modewise, dropping the (0,0) mode without checking.
SpectralField inverse_neg_laplacian(const SpectralField& f);

/// U = (psi_y, -psi_x) with psi = poisson_solve(omega).
VelocityField velocity_from_vorticity(const SpectralField& omega);

/// Pointwise product computed on the grid, then 2/3-truncated.
SpectralField multiply_dealiased(const SpectralField& a, const SpectralField& b);
/// Product with a function of y sampled at the grid rows, 2/3-truncated.
SpectralField multiply_by_rows(const SpectralField& f, std::span<const double> row_values);

/// L2 inner product <f, g> = int f conj(g) dx dy, by Parseval.
cplx inner(const SpectralField& f, const SpectralField& g);
double norm_l2_sq(const SpectralField& f);
double norm_l2(const SpectralField& f);
/// ||grad f||^2.
double norm_grad_sq(const SpectralField& f);
/// ||f||^2 + ||grad f||^2.
double norm_h1_sq(const SpectralField& f);
/// ||f||^2 by trapezoid quadrature of |f|^2 in physical space.
double norm_l2_sq_quadrature(const SpectralField& f);

/// Max over the grid of |u| and |v| of a velocity field.
struct VelocityBounds {
  double max_u = 0.0;
  double max_v = 0.0;
};
VelocityBounds velocity_bounds(const VelocityField& vel);

}  // namespace kflow
