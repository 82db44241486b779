#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "declust/clustering.hpp"
#include "declust/transforms.hpp"

namespace declust {

enum class KernelFamily { Laplace, Gaussian };

// Periodic convolution kernel. domain_scale fixes the length unit of the
// kernel argument relative to the unit circle the signals live on: the
// sampled kernel is g(domain_scale * x) for lattice offsets x. The Laplace
// family uses scale 2*pi (its lambda is calibrated against integer
// frequencies), the Gaussian family scale 1; see README.
struct KernelSpec {
  KernelFamily family;
  double lambda;
  double domain_scale;

  static KernelSpec laplace(double lambda);   // 0.5 exp(-lambda|2 pi x|)
  static KernelSpec gaussian(double lambda);  // exp(-lambda x^2 / 2)
};

struct IllPosednessDescriptor {
  double gamma = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double aleph1 = 0.0;  // lower envelope constant
  double aleph2 = 0.0;  // upper envelope constant
};

// Quasi-singular values nu_j = 1/|g_j| of the inverse operator, in the
// Fourier index ordering of BasisKind. Coefficient magnitudes below the
// floating-point trust floor (8 n eps relative to DC) cannot be
// distinguished from round-off; usable_prefix is the first such index
// (= n when the whole spectrum is trustworthy) and nu is clamped at the
// trust level beyond it.
struct OperatorSpectrum {
  Eigen::VectorXd nu;
  std::size_t usable_prefix = 0;
  std::optional<IllPosednessDescriptor> ill_posedness;

  std::size_t n() const { return static_cast<std::size_t>(nu.size()); }
};

struct DegenerateSpectrumError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpectrumOptions {
  // Reject kernels whose spectrum is not trustworthy across the full band
  // instead of reporting a shorter usable_prefix.
  bool require_full_band = false;
};

// Kernel sampled at lattice offsets i/n (i = 0..n-1, center at index 0),
// wrapped over three periods and normalized to unit sum. The offset grid
// keeps the sampled kernel symmetric mod n, so the convolution operator is
// exactly diagonal in the real Fourier basis.
Eigen::VectorXd discretize_kernel(const KernelSpec& kernel, std::size_t n);

// Throws DegenerateSpectrumError when the kernel mass or a Fourier
// coefficient falls below 1e-300 (operator not invertible on the grid), or
// when options.require_full_band is set and the trust floor truncates the
// band. Fills the ill-posedness exponents for the known families.
OperatorSpectrum spectrum_from_kernel(const KernelSpec& kernel, std::size_t n,
                                      const SpectrumOptions& options = {});

// Same computation for an arbitrary kernel already sampled on the lattice
// (index 0 = origin, length = grid size). No descriptor is attached.
OperatorSpectrum spectrum_from_samples(const Eigen::VectorXd& kernel_lattice,
                                       const SpectrumOptions& options = {});

// Fits envelope constants aleph1/aleph2 = min/max over the usable prefix of
// nu_j / (j^gamma exp(alpha j^beta)) for the descriptor's exponents.
void fit_envelope(OperatorSpectrum& spectrum);

// Checks aleph1 j^gamma e^{alpha j^beta} <= nu_j <= aleph2 ... on the usable
// prefix (indices j = 1.. in the 1-based math convention).
bool check_envelope(const OperatorSpectrum& spectrum);

Eigen::VectorXd periodic_convolve(const Eigen::VectorXd& signal,
                                  const KernelSpec& kernel);
Eigen::VectorXd periodic_convolve(const Eigen::VectorXd& signal,
                                  const Eigen::VectorXd& kernel_lattice);

struct ProblemInstance {
  Eigen::MatrixXd F_true;      // n x M clean signals
  Eigen::MatrixXd Q_true;      // n x M blurred signals
  CoefficientMatrix G_true;    // coefficients of F_true in `basis`
  ClusteringAssignment Z_true;
  int K_true = 0;
  double sigma = 0.0;
  BasisKind basis;
  OperatorSpectrum spectrum;
  KernelSpec kernel;
};

// Samples the K generator functions on the grid, scales each to norm
// sqrt(n), assembles columns by the assignment, convolves, and sets
// sigma = sd(F) / snr (sample SD over all n*M entries).
ProblemInstance build_instance(
    const std::vector<std::function<double(double)>>& functions,
    const ClusteringAssignment& assignment, const KernelSpec& kernel,
    double snr, const BasisKind& basis);

// Q_true + sigma * N(0,1), with one derived noise stream per column so the
// draw is independent of evaluation order.
Eigen::MatrixXd simulate(const ProblemInstance& instance, std::uint64_t seed);

// Columnwise analyze(X) in the given basis: the sequence-model data Y.
CoefficientMatrix to_sequence(const Eigen::MatrixXd& X, const BasisKind& basis);

// Pooled finest-level Daubechies-8 detail coefficients of all columns:
// median(|d|) / 0.6745. Requires n >= 16.
double estimate_noise_level(const Eigen::MatrixXd& X);

}  // namespace declust
