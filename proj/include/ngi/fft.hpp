#pragma once

#include <complex>
#include <cstddef>

namespace ngi::fft {

/// In-place unnormalized 1D transform. sign=+1 applies exp(+i 2*pi j k / n),
/// sign=-1 the conjugate kernel. Always single-threaded; output is
/// bit-reproducible for a given (n, sign) on this platform.
void transform(std::complex<double>* data, std::size_t n, int sign);

/// In-place unnormalized 2D transform of a row-major [n0][n1] array.
void transform2d(std::complex<double>* data, std::size_t n0, std::size_t n1, int sign);

std::size_t next_pow2(std::size_t n);

}  // namespace ngi::fft
