#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kflow/field.hpp"

namespace kflow {

/// Orthogonal L2 projections onto coordinate subspaces of Fourier space.
struct ProjectionTag {
  enum class Kind {
    Shear,     // P0: x-average
    NonShear,  // P_{!=0}
    P1,        // span{cos x, sin x}
    P2,        // span{cos y, sin y}
    P3,        // span{cos x, sin x, cos y, sin y}
    PN,        // N lowest eigenmodes of -Laplacian on the non-shear space
    PNX1,      // same, on X1 = (I - P1) X (the P1 modes are skipped)
  };
  Kind kind = Kind::NonShear;
  int n = 0;  // PN only

  static ProjectionTag shear() { return {Kind::Shear, 0}; }
  static ProjectionTag non_shear() { return {Kind::NonShear, 0}; }
  static ProjectionTag p1() { return {Kind::P1, 0}; }
  static ProjectionTag p2() { return {Kind::P2, 0}; }
  static ProjectionTag p3() { return {Kind::P3, 0}; }
  static ProjectionTag pn(int n) { return {Kind::PN, n}; }
  static ProjectionTag pn_x1(int n) { return {Kind::PNX1, n}; }

  /// "P0", "Pneq0", "P1", "P2", "P3", "PN:8", "PNX1:8".
  std::string name() const;
  static ProjectionTag parse(const std::string& s);
};

/// Modes (k, m) spanning range(PN) in eigenvalue order with ties broken by
/// (|k|, |m|, sign k, sign m). Only 2/3-retained modes are eligible.
std::vector<std::pair<int, int>> pn_modes(const TorusGrid& grid, int n, bool exclude_p1 = false);
/// Number of retained non-shear modes (minus the P1 modes when excluded),
/// the upper bound for PN.
int retained_nonshear_count(const TorusGrid& grid, bool exclude_p1 = false);

SpectralField project(const SpectralField& omega, const ProjectionTag& tag);
/// (I - P) omega.
SpectralField project_complement(const SpectralField& omega, const ProjectionTag& tag);

}  // namespace kflow
