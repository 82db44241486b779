#include "declust/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace declust {

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (!is_power_of_two(n))
    throw std::invalid_argument("fft_radix2: size must be a power of two");
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= static_cast<double>(n);
}

std::vector<std::complex<double>> rfft(const Eigen::VectorXd& x) {
  const std::size_t n = static_cast<std::size_t>(x.size());
  std::vector<std::complex<double>> a(n);
  for (std::size_t i = 0; i < n; ++i)
    a[i] = std::complex<double>(x(static_cast<Eigen::Index>(i)), 0.0);
  fft_radix2(a, false);
  a.resize(n / 2 + 1);
  return a;
}

Eigen::VectorXd irfft(const std::vector<std::complex<double>>& c, std::size_t n) {
  if (c.size() != n / 2 + 1)
    throw std::invalid_argument("irfft: expected n/2+1 coefficients");
  std::vector<std::complex<double>> a(n);
  for (std::size_t k = 0; k <= n / 2; ++k) a[k] = c[k];
  for (std::size_t k = n / 2 + 1; k < n; ++k) a[k] = std::conj(c[n - k]);
  fft_radix2(a, true);
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) out(static_cast<Eigen::Index>(i)) = a[i].real();
  return out;
}

}  // namespace declust
