#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "declust/clustering.hpp"
#include "declust/forward_model.hpp"

namespace declust {

// Parameters of the model-selection penalty. n_cutoff plays the role of the
// sequence length in the penalty's logarithmic terms and defaults to
// floor(delta^-2); it is overridable for desk-scale runs. M is the number of
// columns of the data matrix the penalty is applied to.
struct PenaltyConfig {
  double delta = 0.0;
  double c_psi = 1.0;
  double tau = 2.0;
  double n_cutoff = 0.0;
  int M = 0;
};

PenaltyConfig make_penalty_config(double delta, int M, double tau = 2.0,
                                  double c_psi = 1.0, double n_override = 0.0);

// Penalty for an arbitrary index set J (0-based row indices) and K clusters:
//   2 c^2 delta^2 [ 26 K sum_{j in J} nu_j^2
//     + 39 (max_{j in J} nu_j^2) (M ln K + |J| ln(n e / |J|) + ln(M n / delta^tau)) ]
// with the convention ln K := 0 when K = 1.
double penalty(const std::vector<int>& J, int K, const OperatorSpectrum& spectrum,
               const PenaltyConfig& cfg);

// Nested-set penalty for J = {first L rows}:
//   2 c^2 delta^2 [ 26 K sum_{j<=L} nu_j^2
//     + 39 nu_L^2 (M ln K + ln(M n / delta^tau)) ]
double penalty_nested(int L, int K, const OperatorSpectrum& spectrum,
                      const PenaltyConfig& cfg);

struct SelectionResult {
  ClusteringAssignment assignment;
  int K_hat = 0;
  int L_hat = 0;               // rows kept: 0-based indices [0, L_hat)
  CoefficientMatrix G_hat;     // rows beyond L_hat are exactly zero
  double objective = 0.0;      // attained penalized objective
  double penalty = 0.0;        // penalty term at the minimizer
};

// Penalized joint fit over (Z, K, L). For each K in K_range: cluster the
// weighted data diag(nu) Y once with k-means (restricted to rows below the
// penalty's sequence cutoff, where estimation is meaningful), then sweep L
// exactly; the global minimizer over K (ties: smaller objective, then
// smaller K) is returned with G_hat = W_L diag(nu) Y Pi_Z. The L sweep is
// capped at the spectrum's usable prefix.
SelectionResult solve_joint(const CoefficientMatrix& Y,
                            const OperatorSpectrum& spectrum,
                            const PenaltyConfig& cfg,
                            const KMeansConfig& kmeans_cfg,
                            const std::vector<int>& K_range);

// Row j survives iff its Euclidean row norm exceeds thresholds[j]; zeroed
// otherwise. Returns the thresholded matrix and the kept row indices.
std::pair<Eigen::MatrixXd, std::vector<int>> hard_threshold_rows(
    const Eigen::MatrixXd& G, const Eigen::VectorXd& thresholds);

// Entry (j, m) survives iff |G(j, m)| > thresholds[j].
Eigen::MatrixXd hard_threshold_elements(const Eigen::MatrixXd& G,
                                        const Eigen::VectorXd& thresholds);

}  // namespace declust
