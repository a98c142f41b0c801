#pragma once

#include <complex>
#include <vector>

namespace latnls {

/// Unitary discrete Fourier transform, u_hat_j = N^{-1/2} sum_m u_m e^{-2*pi*i*j*m/N}.
/// Backed by FFTW with cached deterministic plans; safe to call concurrently.
std::vector<std::complex<double>> fft_forward(const std::vector<std::complex<double>>& u);

/// Unitary inverse transform, u_m = N^{-1/2} sum_j u_hat_j e^{+2*pi*i*j*m/N}.
std::vector<std::complex<double>> fft_inverse(const std::vector<std::complex<double>>& u);

} // namespace latnls
