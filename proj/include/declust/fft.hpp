#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace declust {

bool is_power_of_two(std::size_t n);

// In-place iterative radix-2 FFT. Size must be a power of two (throws
// std::invalid_argument otherwise). Forward transform uses the e^{-2pi i jk/n}
// convention with no normalization; the inverse applies the 1/n factor.
void fft_radix2(std::vector<std::complex<double>>& a, bool inverse);

// Real-input FFT returning the n/2+1 nonnegative-frequency coefficients,
// and its inverse. Conventions match the complex transform above.
std::vector<std::complex<double>> rfft(const Eigen::VectorXd& x);
Eigen::VectorXd irfft(const std::vector<std::complex<double>>& c, std::size_t n);

}  // namespace declust
