#pragma once

#include <optional>

#include <Eigen/Dense>

#include "declust/forward_model.hpp"
#include "declust/selection.hpp"

namespace declust {

// Limits on the operating band of the deconvolution, applied as a prefix of
// the Fourier-ordered rows on top of the spectrum's usable prefix:
//   - sequence_cutoff: keep at most floor(delta_hat^-2) rows; beyond that
//     point the amplified noise carries no information about the signal.
//   - amplification_cap: drop rows whose deconvolved noise level
//     delta_hat * nu_j exceeds the cap (columns are normalized to RMS ~1, so
//     such rows contain no recoverable signal, and a rare threshold
//     exceedance there would dominate the error). <= 0 disables the cap.
struct BandOptions {
  bool sequence_cutoff = true;
  double amplification_cap = 3.0;
};

struct ThresholdRule {
  enum class Mode { Row, Element };
  Mode mode = Mode::Row;
  // threshold level for row j: multiplier * delta_hat * sqrt(2 ln(n M)) * rho_j,
  // where rho_j is the row's noise amplification factor
  double multiplier = 1.0;
};

// Which matrix the pre-estimation clustering runs on: the weighted sequence
// data diag(nu) Y (the joint objective's form) or the band-limited raw data Y
// (equivalent to clustering the observations; the weighted form is dominated
// by the amplified high-frequency noise unless the problem is mildly
// ill-posed).
enum class ClusterSource { WeightedY, RawY };

struct PipelineConfig {
  BasisKind basis = BasisKind::fourier(256);
  ThresholdRule threshold;
  ClusterSource cluster_on = ClusterSource::WeightedY;
  BandOptions band;
  KMeansConfig kmeans;
  // Overrides the data-driven noise estimate (tests, noiseless runs).
  std::optional<double> noise_level;
  double tau = 2.0;  // penalty tail exponent when auto-K selection runs
};

struct PipelineOutput {
  Eigen::MatrixXd F_hat;
  std::optional<ClusteringAssignment> assignment;
  double error = 0.0;  // ||F_hat - F_true||_F / sqrt(M n)
  std::optional<double> miss;
};

// ||A - B||_F / sqrt(M n)
double relative_error(const Eigen::MatrixXd& F_hat, const Eigen::MatrixXd& F_true);

// Cluster first, then estimate: sequence-reduce X, cluster columns, average
// within clusters, hard-threshold (rows or elements per config), synthesize.
// K = nullopt selects K by the penalized joint solver.
PipelineOutput clustering_before(const Eigen::MatrixXd& X,
                                 const ProblemInstance& instance,
                                 std::optional<int> K,
                                 const PipelineConfig& config);

// Thresholded per-column inversion, no clustering.
PipelineOutput no_clustering(const Eigen::MatrixXd& X,
                             const ProblemInstance& instance,
                             const PipelineConfig& config);

// Estimate first (no_clustering), then cluster the reconstructions and
// average within clusters.
PipelineOutput clustering_after(const Eigen::MatrixXd& X,
                                const ProblemInstance& instance, int K,
                                const PipelineConfig& config);

// Shared sequence-space preparation, exposed for tests and diagnostics.
struct SequenceWorkspace {
  double delta_hat = 0.0;       // noise level used by thresholds and band
  std::size_t band = 0;         // operating prefix length
  Eigen::VectorXd rho;          // per-row noise amplification (0 outside band)
  Eigen::MatrixXd fourier_Y;    // raw Fourier coefficients of X
  Eigen::MatrixXd weighted;     // deconvolved data in the estimation basis
};

SequenceWorkspace prepare_sequence(const Eigen::MatrixXd& X,
                                   const ProblemInstance& instance,
                                   const PipelineConfig& config);

std::size_t operating_band(double delta_hat, const OperatorSpectrum& spectrum,
                           const BandOptions& options);

}  // namespace declust
