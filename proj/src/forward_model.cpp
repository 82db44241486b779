#include "declust/forward_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "declust/fft.hpp"
#include "declust/rng.hpp"
#include "declust/signals.hpp"

namespace declust {

namespace {

constexpr double kZeroMass = 1e-300;

double kernel_value(const KernelSpec& spec, double x) {
  const double u = spec.domain_scale * x;
  switch (spec.family) {
    case KernelFamily::Laplace:
      return 0.5 * std::exp(-spec.lambda * std::abs(u));
    case KernelFamily::Gaussian:
      return std::exp(-0.5 * spec.lambda * u * u);
  }
  return 0.0;
}

double trust_floor(std::size_t n) {
  return 8.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon();
}

}  // namespace

KernelSpec KernelSpec::laplace(double lambda) {
  if (!(lambda > 0)) throw std::invalid_argument("laplace: lambda must be positive");
  return KernelSpec{KernelFamily::Laplace, lambda, 2.0 * M_PI};
}

KernelSpec KernelSpec::gaussian(double lambda) {
  if (!(lambda > 0)) throw std::invalid_argument("gaussian: lambda must be positive");
  return KernelSpec{KernelFamily::Gaussian, lambda, 1.0};
}

Eigen::VectorXd discretize_kernel(const KernelSpec& kernel, std::size_t n) {
  Eigen::VectorXd g(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    // signed lattice offset in [-1/2, 1/2) keeps the sampled kernel exactly
    // symmetric under i <-> n - i
    double u = static_cast<double>(i) / static_cast<double>(n);
    if (i > n / 2) u -= 1.0;
    double acc = 0.0;
    for (int t = -3; t <= 3; ++t) acc += kernel_value(kernel, u + t);
    g(static_cast<Eigen::Index>(i)) = acc;
  }
  const double mass = g.sum();
  if (!(mass > kZeroMass))
    throw DegenerateSpectrumError("kernel mass vanishes on the grid");
  return g / mass;
}

OperatorSpectrum spectrum_from_samples(const Eigen::VectorXd& kernel_lattice,
                                       const SpectrumOptions& options) {
  const std::size_t n = static_cast<std::size_t>(kernel_lattice.size());
  const double mass = std::abs(kernel_lattice.sum());
  if (!(mass > kZeroMass))
    throw DegenerateSpectrumError("kernel mass vanishes on the grid");
  auto ghat = rfft(kernel_lattice);
  const double dc = std::abs(ghat[0]);
  if (!(dc > kZeroMass))
    throw DegenerateSpectrumError("kernel DC coefficient vanishes");
  // attenuation magnitudes per index in the real Fourier ordering
  Eigen::VectorXd mag(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j)
    mag(static_cast<Eigen::Index>(j)) =
        std::abs(ghat[frequency_of_index(j, n)]) / dc;
  const double floor = trust_floor(n);
  std::size_t usable = n;
  for (std::size_t j = 0; j < n; ++j) {
    if (mag(static_cast<Eigen::Index>(j)) < floor) {
      usable = j;
      break;
    }
  }
  // a trustworthy coefficient after the first crossing means the operator has
  // an interior null direction rather than a decaying tail
  for (std::size_t j = usable; j < n; ++j) {
    if (mag(static_cast<Eigen::Index>(j)) < kZeroMass) {
      bool revives = false;
      for (std::size_t j2 = j + 1; j2 < n; ++j2)
        if (mag(static_cast<Eigen::Index>(j2)) >= floor) revives = true;
      if (revives)
        throw DegenerateSpectrumError(
            "kernel spectrum vanishes inside the trustworthy band");
    }
  }
  if (options.require_full_band && usable < n)
    throw DegenerateSpectrumError(
        "kernel spectrum falls below the trust floor inside the band");
  OperatorSpectrum sp;
  sp.nu = Eigen::VectorXd(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    double m = std::max(mag(static_cast<Eigen::Index>(j)), floor);
    sp.nu(static_cast<Eigen::Index>(j)) = 1.0 / m;
  }
  sp.usable_prefix = usable;
  return sp;
}

OperatorSpectrum spectrum_from_kernel(const KernelSpec& kernel, std::size_t n,
                                      const SpectrumOptions& options) {
  OperatorSpectrum sp = spectrum_from_samples(discretize_kernel(kernel, n), options);
  IllPosednessDescriptor d;
  switch (kernel.family) {
    case KernelFamily::Laplace:
      d.gamma = 2.0;
      d.alpha = 0.0;
      d.beta = 0.0;
      break;
    case KernelFamily::Gaussian:
      d.gamma = 0.0;
      d.alpha = M_PI * M_PI / (2.0 * kernel.lambda);
      d.beta = 2.0;
      break;
  }
  sp.ill_posedness = d;
  fit_envelope(sp);
  return sp;
}

namespace {

double envelope_predictor(const IllPosednessDescriptor& d, std::size_t j_one_based) {
  const double j = static_cast<double>(j_one_based);
  return std::pow(j, d.gamma) * std::exp(d.alpha * std::pow(j, d.beta));
}

}  // namespace

void fit_envelope(OperatorSpectrum& spectrum) {
  if (!spectrum.ill_posedness) return;
  IllPosednessDescriptor& d = *spectrum.ill_posedness;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t j = 0; j < spectrum.usable_prefix; ++j) {
    double ratio = spectrum.nu(static_cast<Eigen::Index>(j)) /
                   envelope_predictor(d, j + 1);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  d.aleph1 = lo;
  d.aleph2 = hi;
}

bool check_envelope(const OperatorSpectrum& spectrum) {
  if (!spectrum.ill_posedness) return false;
  const IllPosednessDescriptor& d = *spectrum.ill_posedness;
  for (std::size_t j = 0; j < spectrum.usable_prefix; ++j) {
    double p = envelope_predictor(d, j + 1);
    double nu = spectrum.nu(static_cast<Eigen::Index>(j));
    if (nu < d.aleph1 * p * (1.0 - 1e-12) || nu > d.aleph2 * p * (1.0 + 1e-12))
      return false;
  }
  return true;
}

Eigen::VectorXd periodic_convolve(const Eigen::VectorXd& signal,
                                  const Eigen::VectorXd& kernel_lattice) {
  if (signal.size() != kernel_lattice.size())
    throw std::invalid_argument("periodic_convolve: length mismatch");
  const std::size_t n = static_cast<std::size_t>(signal.size());
  auto xs = rfft(signal);
  auto gs = rfft(kernel_lattice);
  for (std::size_t k = 0; k < xs.size(); ++k) xs[k] *= gs[k];
  return irfft(xs, n);
}

Eigen::VectorXd periodic_convolve(const Eigen::VectorXd& signal,
                                  const KernelSpec& kernel) {
  return periodic_convolve(
      signal, discretize_kernel(kernel, static_cast<std::size_t>(signal.size())));
}

ProblemInstance build_instance(
    const std::vector<std::function<double(double)>>& functions,
    const ClusteringAssignment& assignment, const KernelSpec& kernel,
    double snr, const BasisKind& basis) {
  const int K = assignment.K;
  const int M = assignment.M();
  const std::size_t n = basis.n;
  if (static_cast<int>(functions.size()) < K)
    throw std::invalid_argument("build_instance: fewer functions than clusters");
  if (!(snr > 0)) throw std::invalid_argument("build_instance: snr must be positive");
  Eigen::VectorXd kernel_samples = discretize_kernel(kernel, n);
  Eigen::MatrixXd reps(static_cast<Eigen::Index>(n), K);
  Eigen::MatrixXd blurred(static_cast<Eigen::Index>(n), K);
  const double target = std::sqrt(static_cast<double>(n));
  for (int k = 0; k < K; ++k) {
    Eigen::VectorXd f = sample_on_grid(functions[static_cast<std::size_t>(k)], n);
    double norm = f.norm();
    if (!(norm > 0))
      throw std::invalid_argument("build_instance: function vanishes on the grid");
    f *= target / norm;
    reps.col(k) = f;
    blurred.col(k) = periodic_convolve(f, kernel_samples);
  }
  ProblemInstance inst;
  inst.F_true.resize(static_cast<Eigen::Index>(n), M);
  inst.Q_true.resize(static_cast<Eigen::Index>(n), M);
  for (int m = 0; m < M; ++m) {
    int k = assignment.labels[static_cast<std::size_t>(m)];
    inst.F_true.col(m) = reps.col(k);
    inst.Q_true.col(m) = blurred.col(k);
  }
  inst.G_true = analyze_columns(inst.F_true, basis);
  inst.Z_true = assignment;
  inst.K_true = K;
  const double mean = inst.F_true.mean();
  const double sd = std::sqrt((inst.F_true.array() - mean).square().sum() /
                              (static_cast<double>(inst.F_true.size()) - 1.0));
  inst.sigma = sd / snr;
  inst.basis = basis;
  inst.spectrum = spectrum_from_kernel(kernel, n);
  inst.kernel = kernel;
  return inst;
}

Eigen::MatrixXd simulate(const ProblemInstance& instance, std::uint64_t seed) {
  Eigen::MatrixXd X = instance.Q_true;
  if (instance.sigma == 0.0) return X;
  for (Eigen::Index m = 0; m < X.cols(); ++m) {
    Rng col_rng(split_seed(seed, static_cast<std::uint64_t>(m)));
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      X(i, m) += instance.sigma * col_rng.normal();
  }
  return X;
}

CoefficientMatrix to_sequence(const Eigen::MatrixXd& X, const BasisKind& basis) {
  return analyze_columns(X, basis);
}

double estimate_noise_level(const Eigen::MatrixXd& X) {
  const std::size_t n = static_cast<std::size_t>(X.rows());
  BasisKind basis = BasisKind::daubechies8(n);
  std::vector<double> details;
  details.reserve(static_cast<std::size_t>(X.cols()) * (n / 2));
  for (Eigen::Index m = 0; m < X.cols(); ++m) {
    Eigen::VectorXd c = analyze(X.col(m).eval(), basis).values;
    for (std::size_t j = n / 2; j < n; ++j)
      details.push_back(std::abs(c(static_cast<Eigen::Index>(j))));
  }
  std::sort(details.begin(), details.end());
  const std::size_t count = details.size();
  double median;
  if (count % 2 == 1)
    median = details[count / 2];
  else
    median = 0.5 * (details[count / 2 - 1] + details[count / 2]);
  return median / 0.6745;
}

}  // namespace declust
