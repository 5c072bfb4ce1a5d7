#pragma once

#include <complex>
#include <span>

namespace edgecalc {

using cd = std::complex<double>;

/// Unnormalized DFT, FFTW sign convention:
///   forward:  out[k] = sum_j in[j] exp(-2*pi*i*j*k/n)
///   inverse:  out[j] = sum_k in[k] exp(+2*pi*i*j*k/n)
/// in and out must have the same size and may alias.
void dft_forward(std::span<const cd> in, std::span<cd> out);
void dft_inverse(std::span<const cd> in, std::span<cd> out);

}  // namespace edgecalc
