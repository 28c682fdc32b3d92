#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kflow/field.hpp"

namespace kflow {

/// Subspace a generated field is projected onto after sampling.
enum class Subspace {
  Full,      // zero mean only
  Shear,     // P0
  NonShear,  // P_{!=0}
  X1,        // (I - P1) P_{!=0}
  PN,        // range(PN), restricted to conjugate-closed modes so the field stays real
  PNX1,      // the same with PN built on X1
};

Subspace parse_subspace(const std::string& s);
std::string to_string(Subspace s);

struct RandomFieldSpec {
  std::uint64_t seed = 1;
  double k0 = 4.0;  // envelope exp(-(k^2 alpha^2 + m^2) / k0^2)
  Subspace subspace = Subspace::NonShear;
  int pn = 8;           // N for Subspace::PN
  double l2_norm = 1.0;  // target ||omega||_{L2}; <= 0 keeps the raw amplitude
};

/// Real, mean-zero, 2/3-dealiased Gaussian field with a reproducible stream:
/// a 64-bit Mersenne Twister feeding Box-Muller, modes visited in a fixed order.
SpectralField random_field(const TorusGrid& grid, const RandomFieldSpec& spec);

/// amplitude * cos(alpha k x + m y + phase)
struct CosineTerm {
  int k = 0;
  int m = 0;
  double amplitude = 1.0;
  double phase = 0.0;
};

SpectralField cosine_field(const TorusGrid& grid, const std::vector<CosineTerm>& terms);

/// Project onto the subspace (the PN variant keeps only conjugate-closed
/// modes of range(PN)).
SpectralField restrict_to(const SpectralField& f, Subspace s, int pn = 8);

}  // namespace kflow
