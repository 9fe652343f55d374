#pragma once

#include <complex>
#include <span>

namespace radonlab::detail {

/// In-place unnormalized complex DFT of length data.size(). Forward uses
/// e^{-i...}; inverse uses e^{+i...} without the 1/N factor.
void fft_inplace(std::span<std::complex<double>> data, bool inverse);

/// In-place unnormalized 2-D DFT of an n x n row-major array.
void fft2_inplace(std::span<std::complex<double>> data, int n, bool inverse);

} // namespace radonlab::detail
