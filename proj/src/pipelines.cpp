#include "declust/pipelines.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace declust {

double relative_error(const Eigen::MatrixXd& F_hat, const Eigen::MatrixXd& F_true) {
  if (F_hat.rows() != F_true.rows() || F_hat.cols() != F_true.cols())
    throw std::invalid_argument("relative_error: shape mismatch");
  return (F_hat - F_true).norm() /
         std::sqrt(static_cast<double>(F_true.size()));
}

std::size_t operating_band(double delta_hat, const OperatorSpectrum& spectrum,
                           const BandOptions& options) {
  std::size_t band = std::min(spectrum.usable_prefix, spectrum.n());
  if (options.sequence_cutoff && delta_hat > 0.0) {
    // same slack as the penalty cutoff so exact reciprocals floor as intended
    double cut = std::floor(1.0 / (delta_hat * delta_hat) * (1.0 + 1e-12));
    if (cut < static_cast<double>(band)) band = static_cast<std::size_t>(cut);
  }
  if (options.amplification_cap > 0.0) {
    while (band > 0 &&
           delta_hat * spectrum.nu(static_cast<Eigen::Index>(band) - 1) >
               options.amplification_cap)
      --band;
  }
  return band;
}

SequenceWorkspace prepare_sequence(const Eigen::MatrixXd& X,
                                   const ProblemInstance& instance,
                                   const PipelineConfig& config) {
  const auto n = static_cast<std::size_t>(X.rows());
  if (config.basis.n != n || instance.spectrum.n() != n)
    throw std::invalid_argument("prepare_sequence: size mismatch");
  SequenceWorkspace ws;
  ws.delta_hat =
      config.noise_level ? *config.noise_level : estimate_noise_level(X);
  ws.band = operating_band(ws.delta_hat, instance.spectrum, config.band);

  const BasisKind fourier = BasisKind::fourier(n);
  ws.fourier_Y = analyze_columns(X, fourier).values;
  Eigen::VectorXd masked_nu = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < ws.band; ++j) {
    auto jj = static_cast<Eigen::Index>(j);
    masked_nu(jj) = instance.spectrum.nu(jj);
  }
  Eigen::MatrixXd UY = masked_nu.asDiagonal() * ws.fourier_Y;
  if (config.basis.variant == BasisVariant::Fourier) {
    ws.weighted = std::move(UY);
    ws.rho = masked_nu;
  } else {
    // express the band-limited deconvolution in the wavelet basis, and
    // propagate the per-row noise amplification through the change of basis
    ws.weighted =
        analyze_columns(synthesize_columns(CoefficientMatrix{UY, fourier}),
                        config.basis)
            .values;
    Eigen::MatrixXd wavelet_atoms = synthesize_columns(CoefficientMatrix{
        Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                  static_cast<Eigen::Index>(n)),
        config.basis});
    Eigen::MatrixXd atoms_f = analyze_columns(wavelet_atoms, fourier).values;
    ws.rho = (masked_nu.asDiagonal() * atoms_f).colwise().norm();
  }
  return ws;
}

namespace {

Eigen::VectorXd threshold_levels(const SequenceWorkspace& ws,
                                 const ThresholdRule& rule, std::size_t M) {
  double t = rule.multiplier * ws.delta_hat *
             std::sqrt(2.0 * std::log(static_cast<double>(ws.rho.size()) *
                                      static_cast<double>(M)));
  return t * ws.rho;
}

Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& G, const BasisKind& basis) {
  return synthesize_columns(CoefficientMatrix{G, basis});
}

}  // namespace

PipelineOutput no_clustering(const Eigen::MatrixXd& X,
                             const ProblemInstance& instance,
                             const PipelineConfig& config) {
  SequenceWorkspace ws = prepare_sequence(X, instance, config);
  Eigen::VectorXd th =
      threshold_levels(ws, config.threshold, static_cast<std::size_t>(X.cols()));
  // per-column estimation keeps or drops each coefficient separately
  Eigen::MatrixXd G = hard_threshold_elements(ws.weighted, th);
  PipelineOutput out;
  out.F_hat = reconstruct(G, config.basis);
  out.error = relative_error(out.F_hat, instance.F_true);
  return out;
}

PipelineOutput clustering_before(const Eigen::MatrixXd& X,
                                 const ProblemInstance& instance,
                                 std::optional<int> K,
                                 const PipelineConfig& config) {
  SequenceWorkspace ws = prepare_sequence(X, instance, config);
  const auto M = static_cast<std::size_t>(X.cols());
  int K_use;
  if (K) {
    K_use = *K;
  } else {
    // penalized joint selection on the band-limited Fourier sequence
    Eigen::MatrixXd Ym = ws.fourier_Y;
    for (Eigen::Index j = static_cast<Eigen::Index>(ws.band); j < Ym.rows(); ++j)
      Ym.row(j).setZero();
    OperatorSpectrum banded = instance.spectrum;
    banded.usable_prefix = ws.band;
    double delta = ws.delta_hat > 0.0 ? ws.delta_hat : 1e-12;
    PenaltyConfig pcfg =
        make_penalty_config(delta, static_cast<int>(M), config.tau);
    std::vector<int> K_range(M);
    std::iota(K_range.begin(), K_range.end(), 1);
    SelectionResult sel =
        solve_joint(CoefficientMatrix{Ym, BasisKind::fourier(config.basis.n)},
                    banded, pcfg, config.kmeans, K_range);
    K_use = sel.K_hat;
  }

  Eigen::MatrixXd raw_masked;
  const Eigen::MatrixXd* src = &ws.weighted;
  if (config.cluster_on == ClusterSource::RawY) {
    raw_masked = ws.fourier_Y;
    for (Eigen::Index j = static_cast<Eigen::Index>(ws.band); j < raw_masked.rows();
         ++j)
      raw_masked.row(j).setZero();
    src = &raw_masked;
  }
  KMeansResult km = kmeans_columns(*src, K_use, config.kmeans);

  Eigen::MatrixXd P = project_columns(ws.weighted, km.assignment);
  Eigen::VectorXd th = threshold_levels(ws, config.threshold, M);
  Eigen::MatrixXd G = config.threshold.mode == ThresholdRule::Mode::Row
                          ? hard_threshold_rows(P, th).first
                          : hard_threshold_elements(P, th);
  PipelineOutput out;
  out.F_hat = reconstruct(G, config.basis);
  out.error = relative_error(out.F_hat, instance.F_true);
  out.assignment = km.assignment;
  out.miss = miss_rate(km.assignment, instance.Z_true);
  return out;
}

PipelineOutput clustering_after(const Eigen::MatrixXd& X,
                                const ProblemInstance& instance, int K,
                                const PipelineConfig& config) {
  PipelineOutput base = no_clustering(X, instance, config);
  KMeansResult km = kmeans_columns(base.F_hat, K, config.kmeans);
  PipelineOutput out;
  out.F_hat = project_columns(base.F_hat, km.assignment);
  out.error = relative_error(out.F_hat, instance.F_true);
  out.assignment = km.assignment;
  out.miss = miss_rate(km.assignment, instance.Z_true);
  return out;
}

}  // namespace declust
