#pragma once

#include <optional>
#include <vector>

#include "kflow/field.hpp"
#include "kflow/flows.hpp"

namespace kflow {

/// Throws unless the flow can act on fields of this grid (matching alpha for
/// bar and dipole states, a 2pi-periodic profile for shear flows).
void check_compatible(const BaseFlow& flow, const TorusGrid& grid);

/// Kernel K(y) sampled at the grid rows; DomainError if it is not strictly
/// positive and finite there.
std::vector<double> kernel_at_rows(const BaseFlow& flow, const TorusGrid& grid);

/// Energy operator L: omega - psi (bar, dipole), omega/K2 - psi (class K+),
/// omega/K1 + psi (class 1).
SpectralField apply_L(const BaseFlow& flow, const SpectralField& omega);

/// Anti-selfadjoint factor J: -sin y d_x (bar), sin y d_x - sin x d_y
/// (dipole), U'' d_x (class K+), -U'' d_x (class 1). Products are dealiased.
SpectralField apply_J(const BaseFlow& flow, const SpectralField& f);

struct NormBundle {
  double l2 = 0.0;
  double h1 = 0.0;        // sqrt(||w||^2 + ||grad w||^2)
  double inner_l = 0.0;   // <L w, w>
  double inner_x1 = 0.0;  // <(-Laplacian - 1) w, w>
  std::optional<double> x;   // sqrt(inner_l) when nonnegative
  std::optional<double> x1;  // sqrt(inner_x1) when nonnegative
  double weighted_l2 = 0.0;  // ||w / sqrt(K)||, equals l2 for bar/dipole
  bool indefinite = false;
};

NormBundle norms(const BaseFlow& flow, const SpectralField& omega);

}  // namespace kflow
