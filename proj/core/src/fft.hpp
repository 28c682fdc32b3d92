#pragma once

#include <complex>
#include <span>

namespace kflow::detail {

// Unnormalized in-place-capable 2D DFT over a rows x cols row-major array.
// sign = -1 forward (e^{-i}), +1 backward. Thread-safe: plans are cached
// under a lock, execution uses the new-array interface.
void dft2d(int rows, int cols, std::span<const std::complex<double>> in,
           std::span<std::complex<double>> out, int sign);

}  // namespace kflow::detail
