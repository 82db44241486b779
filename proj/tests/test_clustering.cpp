#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "declust/clustering.hpp"
#include "declust/rng.hpp"
#include "oracles.hpp"

using namespace declust;

TEST_CASE("assignment construction validates labels") {
  auto z = ClusteringAssignment::from_labels({0, 1, 0, 2, 1}, 3);
  CHECK(z.M() == 5);
  CHECK(z.sizes == std::vector<int>{2, 2, 1});
  CHECK_THROWS_AS(ClusteringAssignment::from_labels({0, 1, 0}, 3),
                  std::invalid_argument);  // cluster 2 empty
  CHECK_THROWS_AS(ClusteringAssignment::from_labels({0, 3}, 3),
                  std::invalid_argument);  // label out of range
  CHECK_THROWS_AS(ClusteringAssignment::from_labels({}, 0), std::invalid_argument);
}

TEST_CASE("column projection equals the dense projector") {
  Rng r(5);
  Eigen::MatrixXd G(6, 10);
  for (Eigen::Index i = 0; i < G.size(); ++i) G.data()[i] = r.normal();
  auto z = ClusteringAssignment::from_labels({0, 1, 2, 0, 1, 2, 0, 1, 2, 0}, 3);
  Eigen::MatrixXd P = project_columns(G, z);
  Eigen::MatrixXd dense = oracles::dense_projection(G, z.labels, 3);
  CHECK((P - dense).cwiseAbs().maxCoeff() < 1e-12);
  // idempotent
  CHECK((project_columns(P, z) - P).cwiseAbs().maxCoeff() < 1e-12);
  // single cluster: every column becomes the grand mean
  auto z1 = ClusteringAssignment::from_labels(std::vector<int>(10, 0), 1);
  Eigen::MatrixXd P1 = project_columns(G, z1);
  Eigen::VectorXd mean = G.rowwise().mean();
  for (int m = 0; m < 10; ++m)
    CHECK((P1.col(m) - mean).cwiseAbs().maxCoeff() < 1e-12);
  // linear
  Eigen::MatrixXd H = 2.0 * G;
  CHECK((project_columns(H, z) - 2.0 * P).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("k-means recovers well-separated blobs exactly") {
  Rng r(11);
  const int per = 20;
  Eigen::MatrixXd G(5, 3 * per);
  std::vector<int> truth_labels(3 * per);
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < per; ++i) {
      int m = k * per + i;
      truth_labels[static_cast<std::size_t>(m)] = k;
      for (int d = 0; d < 5; ++d) G(d, m) = 50.0 * k + r.normal();
    }
  KMeansConfig cfg;
  cfg.seed = 101;
  KMeansResult res = kmeans_columns(G, 3, cfg);
  auto truth = ClusteringAssignment::from_labels(truth_labels, 3);
  CHECK(miss_rate(res.assignment, truth) == 0.0);
  // reported objective is the within-cluster scatter it claims to be
  double recomputed = (G - project_columns(G, res.assignment)).squaredNorm();
  CHECK(res.objective == doctest::Approx(recomputed).epsilon(1e-12));
}

TEST_CASE("k-means matches brute force on small instances") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    Rng r(seed);
    Eigen::MatrixXd G(3, 8);
    for (Eigen::Index i = 0; i < G.size(); ++i) G.data()[i] = r.normal();
    for (int K : {2, 3}) {
      KMeansConfig cfg;
      cfg.seed = 31 * seed + static_cast<std::uint64_t>(K);
      cfg.restarts = 80;
      KMeansResult res = kmeans_columns(G, K, cfg);
      double best = oracles::best_partition_objective(G, K);
      CHECK(res.objective <= best * (1.0 + 1e-9) + 1e-12);
      CHECK(res.objective >= best * (1.0 - 1e-9) - 1e-12);
    }
  }
}

TEST_CASE("k-means determinism and degenerate K") {
  Rng r(9);
  Eigen::MatrixXd G(4, 12);
  for (Eigen::Index i = 0; i < G.size(); ++i) G.data()[i] = r.normal();
  KMeansConfig cfg;
  cfg.seed = 7;
  KMeansResult a = kmeans_columns(G, 3, cfg);
  KMeansResult b = kmeans_columns(G, 3, cfg);
  CHECK(a.assignment.labels == b.assignment.labels);
  CHECK(a.objective == b.objective);
  // K = 1: objective is the total scatter around the mean column
  KMeansResult one = kmeans_columns(G, 1, cfg);
  Eigen::MatrixXd centered = G.colwise() - G.rowwise().mean().eval();
  CHECK(one.objective == doctest::Approx(centered.squaredNorm()).epsilon(1e-12));
  // K = M: perfect fit
  KMeansResult all = kmeans_columns(G, 12, cfg);
  CHECK(all.objective == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(kmeans_columns(G, 0, cfg), std::invalid_argument);
  CHECK_THROWS_AS(kmeans_columns(G, 13, cfg), std::invalid_argument);
}

TEST_CASE("miss rate: invariance, known value, permutation oracle") {
  auto truth = ClusteringAssignment::from_labels({0, 0, 1, 1}, 2);
  CHECK(miss_rate(truth, truth) == 0.0);
  // relabeling costs nothing
  auto swapped = ClusteringAssignment::from_labels({1, 1, 0, 0}, 2);
  CHECK(miss_rate(swapped, truth) == 0.0);
  // one of four columns off
  auto off = ClusteringAssignment::from_labels({0, 1, 1, 1}, 2);
  CHECK(miss_rate(off, truth) == doctest::Approx(0.25));
  // random instances against the exhaustive permutation matcher
  Rng r(77);
  for (int trial = 0; trial < 200; ++trial) {
    int M = 5 + static_cast<int>(r.uniform_int(5));
    int Ka = 1 + static_cast<int>(r.uniform_int(4));
    int Kb = 1 + static_cast<int>(r.uniform_int(4));
    std::vector<int> la(static_cast<std::size_t>(M)), lb(static_cast<std::size_t>(M));
    // force every cluster nonempty by seeding one point per label
    for (int k = 0; k < Ka; ++k) la[static_cast<std::size_t>(k % M)] = k;
    for (int k = 0; k < Kb; ++k) lb[static_cast<std::size_t>(k % M)] = k;
    for (int m = std::max(Ka, Kb); m < M; ++m) {
      la[static_cast<std::size_t>(m)] = static_cast<int>(r.uniform_int(static_cast<std::uint64_t>(Ka)));
      lb[static_cast<std::size_t>(m)] = static_cast<int>(r.uniform_int(static_cast<std::uint64_t>(Kb)));
    }
    if (M < std::max(Ka, Kb)) continue;
    auto za = ClusteringAssignment::from_labels(la, Ka);
    auto zb = ClusteringAssignment::from_labels(lb, Kb);
    double fast = miss_rate(za, zb);
    double slow = oracles::permutation_miss_rate(la, Ka, lb, Kb);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
    CHECK(miss_rate(zb, za) == doctest::Approx(fast).epsilon(1e-12));
  }
}
