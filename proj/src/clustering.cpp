#include "declust/clustering.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace declust {

ClusteringAssignment ClusteringAssignment::from_labels(std::vector<int> labels,
                                                       int K) {
  if (K < 1 || labels.empty())
    throw std::invalid_argument("assignment needs K >= 1 and at least one column");
  std::vector<int> sizes(static_cast<std::size_t>(K), 0);
  for (int l : labels) {
    if (l < 0 || l >= K) throw std::invalid_argument("label out of range");
    ++sizes[static_cast<std::size_t>(l)];
  }
  for (int s : sizes)
    if (s == 0) throw std::invalid_argument("empty cluster in assignment");
  ClusteringAssignment z;
  z.labels = std::move(labels);
  z.K = K;
  z.sizes = std::move(sizes);
  return z;
}

ClusteringAssignment make_balanced_assignment(int M, int K, Rng& rng) {
  if (K < 1 || M < K || M % K != 0)
    throw std::invalid_argument("balanced assignment needs K | M");
  std::vector<int> labels(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) labels[static_cast<std::size_t>(m)] = m / (M / K);
  rng.shuffle(labels);
  return ClusteringAssignment::from_labels(std::move(labels), K);
}

Eigen::MatrixXd project_columns(const Eigen::MatrixXd& G,
                                const ClusteringAssignment& assignment) {
  if (G.cols() != assignment.M())
    throw std::invalid_argument("project_columns: column count mismatch");
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(G.rows(), assignment.K);
  for (Eigen::Index m = 0; m < G.cols(); ++m)
    means.col(assignment.labels[static_cast<std::size_t>(m)]) += G.col(m);
  for (int k = 0; k < assignment.K; ++k)
    means.col(k) /= static_cast<double>(assignment.sizes[static_cast<std::size_t>(k)]);
  Eigen::MatrixXd out(G.rows(), G.cols());
  for (Eigen::Index m = 0; m < G.cols(); ++m)
    out.col(m) = means.col(assignment.labels[static_cast<std::size_t>(m)]);
  return out;
}

namespace {

struct LloydResult {
  std::vector<int> labels;
  double objective = std::numeric_limits<double>::infinity();
};

// squared distances of every column to one centroid
void distances_to(const Eigen::MatrixXd& G, const Eigen::VectorXd& c,
                  Eigen::VectorXd& out) {
  out = (G.colwise() - c).colwise().squaredNorm().transpose();
}

LloydResult lloyd_once(const Eigen::MatrixXd& G, int K, const KMeansConfig& config,
                       Rng& rng) {
  const Eigen::Index M = G.cols();
  // k-means++ seeding with cumulative-sum sampling
  Eigen::MatrixXd centroids(G.rows(), K);
  Eigen::VectorXd best_dist =
      Eigen::VectorXd::Constant(M, std::numeric_limits<double>::infinity());
  Eigen::VectorXd dist(M);
  centroids.col(0) = G.col(static_cast<Eigen::Index>(
      rng.uniform_int(static_cast<std::uint64_t>(M))));
  for (int k = 1; k < K; ++k) {
    distances_to(G, centroids.col(k - 1), dist);
    best_dist = best_dist.cwiseMin(dist);
    double total = best_dist.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      double acc = 0.0;
      pick = M - 1;
      for (Eigen::Index m = 0; m < M; ++m) {
        acc += best_dist(m);
        if (acc >= target) {
          pick = m;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.uniform_int(static_cast<std::uint64_t>(M)));
    }
    centroids.col(k) = G.col(pick);
  }
  std::vector<int> labels(static_cast<std::size_t>(M), 0);
  std::vector<int> counts(static_cast<std::size_t>(K), 0);
  double prev_objective = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < config.max_iters; ++iter) {
    // assignment step; ties go to the lowest cluster index
    bool changed = false;
    double objective = 0.0;
    std::fill(counts.begin(), counts.end(), 0);
    for (Eigen::Index m = 0; m < M; ++m) {
      int best_k = 0;
      double best = (G.col(m) - centroids.col(0)).squaredNorm();
      for (int k = 1; k < K; ++k) {
        double d = (G.col(m) - centroids.col(k)).squaredNorm();
        if (d < best) {
          best = d;
          best_k = k;
        }
      }
      if (labels[static_cast<std::size_t>(m)] != best_k) {
        labels[static_cast<std::size_t>(m)] = best_k;
        changed = true;
      }
      ++counts[static_cast<std::size_t>(best_k)];
      objective += best;
    }
    // repair empty clusters from the farthest point (deterministic)
    for (int k = 0; k < K; ++k) {
      if (counts[static_cast<std::size_t>(k)] > 0) continue;
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index m = 0; m < M; ++m) {
        if (counts[static_cast<std::size_t>(
                labels[static_cast<std::size_t>(m)])] <= 1)
          continue;  // moving a singleton would empty its cluster
        double d =
            (G.col(m) - centroids.col(labels[static_cast<std::size_t>(m)]))
                .squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = m;
        }
      }
      --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
      labels[static_cast<std::size_t>(far)] = k;
      ++counts[static_cast<std::size_t>(k)];
      changed = true;
    }
    // update step
    centroids.setZero();
    for (Eigen::Index m = 0; m < M; ++m)
      centroids.col(labels[static_cast<std::size_t>(m)]) += G.col(m);
    for (int k = 0; k < K; ++k)
      centroids.col(k) /= static_cast<double>(counts[static_cast<std::size_t>(k)]);
    if (!changed || prev_objective - objective <= config.tol) break;
    prev_objective = objective;
  }
  LloydResult res;
  res.labels = std::move(labels);
  // final objective against the converged centroids
  res.objective = 0.0;
  for (Eigen::Index m = 0; m < M; ++m)
    res.objective +=
        (G.col(m) - centroids.col(res.labels[static_cast<std::size_t>(m)]))
            .squaredNorm();
  return res;
}

}  // namespace

KMeansResult kmeans_columns(const Eigen::MatrixXd& G, int K,
                            const KMeansConfig& config) {
  const Eigen::Index M = G.cols();
  if (K < 1 || K > M)
    throw std::invalid_argument("kmeans_columns: need 1 <= K <= M");
  LloydResult best;
  for (int r = 0; r < std::max(1, config.restarts); ++r) {
    Rng rng(split_seed(config.seed, static_cast<std::uint64_t>(r)));
    LloydResult run = lloyd_once(G, K, config, rng);
    if (run.objective < best.objective) best = std::move(run);
  }
  KMeansResult out;
  out.assignment = ClusteringAssignment::from_labels(best.labels, K);
  out.objective = best.objective;
  return out;
}

double miss_rate(const ClusteringAssignment& estimated,
                 const ClusteringAssignment& truth) {
  const int M = estimated.M();
  if (M != truth.M()) throw std::invalid_argument("miss_rate: size mismatch");
  const int K = std::max(estimated.K, truth.K);
  if (K > 20) throw std::invalid_argument("miss_rate: too many clusters");
  // agreement counts
  std::vector<std::vector<int>> agree(static_cast<std::size_t>(K),
                                      std::vector<int>(static_cast<std::size_t>(K), 0));
  for (int m = 0; m < M; ++m)
    ++agree[static_cast<std::size_t>(estimated.labels[static_cast<std::size_t>(m)])]
           [static_cast<std::size_t>(truth.labels[static_cast<std::size_t>(m)])];
  // assignment problem over label bijections by subset dynamic programming:
  // dp[mask] = best agreement matching estimated labels 0..popcount-1 to the
  // truth-label subset mask
  const std::size_t full = (static_cast<std::size_t>(1) << K) - 1;
  std::vector<int> dp(full + 1, -1);
  dp[0] = 0;
  for (std::size_t mask = 1; mask <= full; ++mask) {
    int a = __builtin_popcountll(mask) - 1;
    for (int b = 0; b < K; ++b) {
      if (!(mask & (static_cast<std::size_t>(1) << b))) continue;
      std::size_t rest = mask ^ (static_cast<std::size_t>(1) << b);
      if (dp[rest] < 0) continue;
      dp[mask] = std::max(dp[mask],
                          dp[rest] + agree[static_cast<std::size_t>(a)]
                                          [static_cast<std::size_t>(b)]);
    }
  }
  return 1.0 - static_cast<double>(dp[full]) / static_cast<double>(M);
}

}  // namespace declust
