#include "declust/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace declust {

PenaltyConfig make_penalty_config(double delta, int M, double tau, double c_psi,
                                  double n_override) {
  if (!(delta > 0.0)) throw std::invalid_argument("penalty needs delta > 0");
  if (M < 1) throw std::invalid_argument("penalty needs M >= 1");
  if (!(c_psi > 0.0) || !(tau > 0.0))
    throw std::invalid_argument("penalty constants must be positive");
  PenaltyConfig cfg;
  cfg.delta = delta;
  cfg.c_psi = c_psi;
  cfg.tau = tau;
  cfg.M = M;
  // the tiny relative slack keeps exact reciprocals (delta = 0.1 -> 100) from
  // landing one below the intended integer after rounding in delta * delta
  cfg.n_cutoff = n_override > 0.0
                     ? n_override
                     : std::floor(1.0 / (delta * delta) * (1.0 + 1e-12));
  return cfg;
}

double penalty(const std::vector<int>& J, int K, const OperatorSpectrum& spectrum,
               const PenaltyConfig& cfg) {
  if (K < 1) throw std::invalid_argument("penalty needs K >= 1");
  if (J.empty()) return 0.0;
  double sum_nu2 = 0.0;
  double max_nu2 = 0.0;
  for (int j : J) {
    if (j < 0 || j >= spectrum.nu.size())
      throw std::invalid_argument("penalty row index out of range");
    double v = spectrum.nu(j) * spectrum.nu(j);
    sum_nu2 += v;
    max_nu2 = std::max(max_nu2, v);
  }
  const double card = static_cast<double>(J.size());
  const double ln_K = K > 1 ? std::log(static_cast<double>(K)) : 0.0;
  const double logs =
      static_cast<double>(cfg.M) * ln_K + card * std::log(cfg.n_cutoff * M_E / card) +
      std::log(static_cast<double>(cfg.M) * cfg.n_cutoff / std::pow(cfg.delta, cfg.tau));
  return 2.0 * cfg.c_psi * cfg.c_psi * cfg.delta * cfg.delta *
         (26.0 * K * sum_nu2 + 39.0 * max_nu2 * logs);
}

double penalty_nested(int L, int K, const OperatorSpectrum& spectrum,
                      const PenaltyConfig& cfg) {
  if (K < 1) throw std::invalid_argument("penalty needs K >= 1");
  if (L < 0 || L > spectrum.nu.size())
    throw std::invalid_argument("nested penalty prefix out of range");
  if (L == 0) return 0.0;
  double sum_nu2 = 0.0;
  for (int j = 0; j < L; ++j) sum_nu2 += spectrum.nu(j) * spectrum.nu(j);
  const double nu_L2 = spectrum.nu(L - 1) * spectrum.nu(L - 1);
  const double ln_K = K > 1 ? std::log(static_cast<double>(K)) : 0.0;
  const double logs =
      static_cast<double>(cfg.M) * ln_K +
      std::log(static_cast<double>(cfg.M) * cfg.n_cutoff / std::pow(cfg.delta, cfg.tau));
  return 2.0 * cfg.c_psi * cfg.c_psi * cfg.delta * cfg.delta *
         (26.0 * K * sum_nu2 + 39.0 * nu_L2 * logs);
}

SelectionResult solve_joint(const CoefficientMatrix& Y,
                            const OperatorSpectrum& spectrum,
                            const PenaltyConfig& cfg,
                            const KMeansConfig& kmeans_cfg,
                            const std::vector<int>& K_range) {
  const Eigen::Index n = Y.values.rows();
  const Eigen::Index M = Y.values.cols();
  if (n != spectrum.nu.size())
    throw std::invalid_argument("solve_joint: spectrum length mismatch");
  if (K_range.empty()) throw std::invalid_argument("solve_joint: empty K range");
  for (int K : K_range)
    if (K < 1 || K > M) throw std::invalid_argument("solve_joint: K out of range");

  const Eigen::MatrixXd B = spectrum.nu.asDiagonal() * Y.values;
  const double total = B.squaredNorm();
  const int L_max = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(n), spectrum.usable_prefix));

  // Cluster on the statistically meaningful prefix only. Rows beyond the
  // penalty's sequence cutoff hold noise amplified by nu_j; with a severely
  // ill-posed spectrum they would swamp the column geometry, while the
  // penalty keeps every admissible L below the cutoff anyway, so those rows
  // carry no information the sweep can use.
  Eigen::Index mask_rows = static_cast<Eigen::Index>(L_max);
  if (cfg.n_cutoff < static_cast<double>(mask_rows))
    mask_rows = static_cast<Eigen::Index>(cfg.n_cutoff);
  Eigen::MatrixXd B_cluster;
  if (mask_rows >= 1 && mask_rows < n) {
    B_cluster = Eigen::MatrixXd::Zero(n, M);
    B_cluster.topRows(mask_rows) = B.topRows(mask_rows);
  } else {
    B_cluster = B;
  }

  double best_obj = std::numeric_limits<double>::infinity();
  int best_K = 0, best_L = 0;
  ClusteringAssignment best_Z;
  for (int K : K_range) {
    KMeansResult km = kmeans_columns(B_cluster, K, kmeans_cfg);
    const Eigen::MatrixXd P = project_columns(B, km.assignment);
    // exact sweep over nested prefixes via cumulative projected row energy:
    // ||B - W_L P||^2 = ||B||^2 - sum_{j<L} ||P row j||^2
    double captured = 0.0;
    for (int L = 0; L <= L_max; ++L) {
      if (L > 0) captured += P.row(L - 1).squaredNorm();
      double obj = total - captured + penalty_nested(L, K, spectrum, cfg);
      bool better = obj < best_obj ||
                    (obj == best_obj &&
                     (K < best_K || (K == best_K && L < best_L)));
      if (better) {
        best_obj = obj;
        best_K = K;
        best_L = L;
        best_Z = km.assignment;
      }
    }
  }

  SelectionResult res;
  res.assignment = best_Z;
  res.K_hat = best_K;
  res.L_hat = best_L;
  res.penalty = penalty_nested(best_L, best_K, spectrum, cfg);
  Eigen::MatrixXd G = project_columns(B, best_Z);
  for (Eigen::Index j = best_L; j < n; ++j) G.row(j).setZero();
  res.G_hat = CoefficientMatrix{G, Y.basis};
  res.objective = (B - G).squaredNorm() + res.penalty;
  return res;
}

std::pair<Eigen::MatrixXd, std::vector<int>> hard_threshold_rows(
    const Eigen::MatrixXd& G, const Eigen::VectorXd& thresholds) {
  if (thresholds.size() != G.rows())
    throw std::invalid_argument("hard_threshold_rows: threshold length mismatch");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(G.rows(), G.cols());
  std::vector<int> kept;
  for (Eigen::Index j = 0; j < G.rows(); ++j) {
    if (G.row(j).norm() > thresholds(j)) {
      out.row(j) = G.row(j);
      kept.push_back(static_cast<int>(j));
    }
  }
  return {out, kept};
}

Eigen::MatrixXd hard_threshold_elements(const Eigen::MatrixXd& G,
                                        const Eigen::VectorXd& thresholds) {
  if (thresholds.size() != G.rows())
    throw std::invalid_argument("hard_threshold_elements: threshold length mismatch");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(G.rows(), G.cols());
  for (Eigen::Index j = 0; j < G.rows(); ++j)
    for (Eigen::Index m = 0; m < G.cols(); ++m)
      if (std::abs(G(j, m)) > thresholds(j)) out(j, m) = G(j, m);
  return out;
}

}  // namespace declust
