#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "declust/rng.hpp"

namespace declust {

// Partition of M columns into K nonempty clusters. labels[m] in [0, K).
struct ClusteringAssignment {
  std::vector<int> labels;
  int K = 0;
  std::vector<int> sizes;

  // Validates the label range and that every cluster is nonempty.
  static ClusteringAssignment from_labels(std::vector<int> labels, int K);

  int M() const { return static_cast<int>(labels.size()); }
};

// Balanced random assignment: M/K columns per cluster (M divisible by K),
// order shuffled by rng.
ClusteringAssignment make_balanced_assignment(int M, int K, Rng& rng);

struct KMeansConfig {
  int restarts = 50;
  int max_iters = 100;
  double tol = 0.0;  // extra stop: objective improvement <= tol
  std::uint64_t seed = 0;
};

// Replaces every column by the mean of the columns sharing its cluster,
// i.e. right-multiplication by the projector Z (Z^T Z)^{-1} Z^T.
Eigen::MatrixXd project_columns(const Eigen::MatrixXd& G,
                                const ClusteringAssignment& assignment);

struct KMeansResult {
  ClusteringAssignment assignment;
  double objective = 0.0;  // ||G - project_columns(G, assignment)||_F^2
};

// k-means++ initialized Lloyd iterations over column vectors, best of
// config.restarts runs (ties: lowest restart index). Nearest-centroid ties
// break to the lowest cluster index; empty clusters are reseeded from the
// farthest point. Deterministic given config.seed.
KMeansResult kmeans_columns(const Eigen::MatrixXd& G, int K,
                            const KMeansConfig& config);

// Fraction of columns whose estimated label differs from the true one under
// the best label permutation (exact assignment matching). Label sets of
// different sizes are padded with unused labels.
double miss_rate(const ClusteringAssignment& estimated,
                 const ClusteringAssignment& truth);

}  // namespace declust
