#include "declust/transforms.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "declust/fft.hpp"

namespace declust {

namespace {

void check_size(std::size_t n, std::size_t floor_len) {
  if (!is_power_of_two(n) || n < floor_len)
    throw std::invalid_argument("basis length must be a power of two and at least " +
                                std::to_string(floor_len));
}

}  // namespace

BasisKind BasisKind::fourier(std::size_t n) {
  // the trigonometric transform works for any dyadic length down to 2
  check_size(n, 2);
  return BasisKind{BasisVariant::Fourier, n};
}

BasisKind BasisKind::daubechies8(std::size_t n) {
  // the periodized filter bank has 16 taps, so shorter signals would wrap
  // a single filter onto itself more than once
  check_size(n, 16);
  return BasisKind{BasisVariant::Daubechies8, n};
}

bool operator==(const BasisKind& a, const BasisKind& b) {
  return a.variant == b.variant && a.n == b.n;
}

std::size_t frequency_of_index(std::size_t j, std::size_t n) {
  if (j == 0) return 0;
  if (j == n - 1) return n / 2;
  return (j + 1) / 2;
}

namespace db8 {

const std::array<double, 16> lowpass = {
    -0.0001174767841247695337306,
    0.0006754494064505693663695,
    -0.0003917403733769470462981,
    -0.004870352993451574310422,
    0.008746094047405776716383,
    0.01398102791739828164872,
    -0.04408825393079475150676,
    -0.01736930100180754616962,
    0.128747426620478458857,
    0.0004724845739132827703606,
    -0.2840155429615469265162,
    -0.01582910525634930566738,
    0.5853546836542067127713,
    0.6756307362972898068078,
    0.3128715909142999706592,
    0.05441584224310400995501,
};

const std::array<double, 16>& highpass() {
  static const std::array<double, 16> g = [] {
    std::array<double, 16> out{};
    for (std::size_t i = 0; i < 16; ++i)
      out[i] = (i % 2 == 0 ? 1.0 : -1.0) * lowpass[15 - i];
    return out;
  }();
  return g;
}

}  // namespace db8

namespace {

// One periodized analysis step: length m signal -> m/2 approximations and
// m/2 details.
void dwt_step(const Eigen::VectorXd& a, std::size_t m, Eigen::VectorXd& approx,
              Eigen::VectorXd& detail) {
  const auto& h = db8::lowpass;
  const auto& g = db8::highpass();
  approx.resize(static_cast<Eigen::Index>(m / 2));
  detail.resize(static_cast<Eigen::Index>(m / 2));
  for (std::size_t k = 0; k < m / 2; ++k) {
    double sa = 0.0, sd = 0.0;
    for (std::size_t i = 0; i < 16; ++i) {
      double x = a(static_cast<Eigen::Index>((2 * k + i) % m));
      sa += h[i] * x;
      sd += g[i] * x;
    }
    approx(static_cast<Eigen::Index>(k)) = sa;
    detail(static_cast<Eigen::Index>(k)) = sd;
  }
}

// Inverse of dwt_step.
void idwt_step(const Eigen::VectorXd& approx, const Eigen::VectorXd& detail,
               std::size_t m, Eigen::VectorXd& out) {
  const auto& h = db8::lowpass;
  const auto& g = db8::highpass();
  out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < m / 2; ++k) {
    const double av = approx(static_cast<Eigen::Index>(k));
    const double dv = detail(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < 16; ++i)
      out(static_cast<Eigen::Index>((2 * k + i) % m)) += h[i] * av + g[i] * dv;
  }
}

Eigen::VectorXd wavelet_analyze(const Eigen::VectorXd& x) {
  const std::size_t n = static_cast<std::size_t>(x.size());
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  Eigen::VectorXd a = x, approx, detail;
  for (std::size_t m = n; m >= 2; m /= 2) {
    dwt_step(a, m, approx, detail);
    out.segment(static_cast<Eigen::Index>(m / 2),
                static_cast<Eigen::Index>(m / 2)) = detail;
    a = approx;
  }
  out(0) = a(0);
  return out;
}

Eigen::VectorXd wavelet_synthesize(const Eigen::VectorXd& c) {
  const std::size_t n = static_cast<std::size_t>(c.size());
  Eigen::VectorXd a(1);
  a(0) = c(0);
  Eigen::VectorXd next;
  for (std::size_t m = 2; m <= n; m *= 2) {
    Eigen::VectorXd detail = c.segment(static_cast<Eigen::Index>(m / 2),
                                       static_cast<Eigen::Index>(m / 2));
    idwt_step(a, detail, m, next);
    a = next;
  }
  return a;
}

Eigen::VectorXd fourier_analyze(const Eigen::VectorXd& x) {
  const std::size_t n = static_cast<std::size_t>(x.size());
  auto c = rfft(x);
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  const double pair_scale = std::sqrt(2.0 / static_cast<double>(n));
  out(0) = c[0].real() * inv_sqrt_n;
  for (std::size_t k = 1; k < n / 2; ++k) {
    out(static_cast<Eigen::Index>(2 * k - 1)) = c[k].real() * pair_scale;
    out(static_cast<Eigen::Index>(2 * k)) = -c[k].imag() * pair_scale;
  }
  out(static_cast<Eigen::Index>(n - 1)) = c[n / 2].real() * inv_sqrt_n;
  return out;
}

Eigen::VectorXd fourier_synthesize(const Eigen::VectorXd& v) {
  const std::size_t n = static_cast<std::size_t>(v.size());
  std::vector<std::complex<double>> c(n / 2 + 1);
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const double pair_scale = std::sqrt(static_cast<double>(n) / 2.0);
  c[0] = std::complex<double>(v(0) * sqrt_n, 0.0);
  for (std::size_t k = 1; k < n / 2; ++k)
    c[k] = std::complex<double>(v(static_cast<Eigen::Index>(2 * k - 1)),
                                -v(static_cast<Eigen::Index>(2 * k))) *
           pair_scale;
  c[n / 2] = std::complex<double>(v(static_cast<Eigen::Index>(n - 1)) * sqrt_n, 0.0);
  return irfft(c, n);
}

}  // namespace

CoefficientVector analyze(const Eigen::VectorXd& signal, const BasisKind& basis) {
  if (static_cast<std::size_t>(signal.size()) != basis.n)
    throw std::invalid_argument("analyze: signal length does not match basis");
  if (basis.variant == BasisVariant::Fourier)
    return CoefficientVector{fourier_analyze(signal), basis};
  return CoefficientVector{wavelet_analyze(signal), basis};
}

Eigen::VectorXd synthesize(const CoefficientVector& coeffs) {
  if (static_cast<std::size_t>(coeffs.values.size()) != coeffs.basis.n)
    throw std::invalid_argument("synthesize: coefficient length does not match basis");
  if (coeffs.basis.variant == BasisVariant::Fourier)
    return fourier_synthesize(coeffs.values);
  return wavelet_synthesize(coeffs.values);
}

CoefficientMatrix analyze_columns(const Eigen::MatrixXd& X, const BasisKind& basis) {
  if (static_cast<std::size_t>(X.rows()) != basis.n)
    throw std::invalid_argument("analyze_columns: row count does not match basis");
  Eigen::MatrixXd out(X.rows(), X.cols());
  for (Eigen::Index m = 0; m < X.cols(); ++m)
    out.col(m) = analyze(X.col(m).eval(), basis).values;
  return CoefficientMatrix{out, basis};
}

Eigen::MatrixXd synthesize_columns(const CoefficientMatrix& G) {
  if (static_cast<std::size_t>(G.values.rows()) != G.basis.n)
    throw std::invalid_argument("synthesize_columns: row count does not match basis");
  Eigen::MatrixXd out(G.values.rows(), G.values.cols());
  for (Eigen::Index m = 0; m < G.values.cols(); ++m)
    out.col(m) = synthesize(CoefficientVector{G.values.col(m), G.basis});
  return out;
}

}  // namespace declust
