#include "declust/theory.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "declust/rng.hpp"

namespace declust {

double sobolev_seminorm(const Eigen::VectorXd& theta, double r) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < theta.size(); ++j)
    acc += theta(j) * theta(j) * std::pow(static_cast<double>(j + 1), 2.0 * r);
  return acc;
}

bool in_sobolev_ball(const Eigen::VectorXd& theta, double r, double A_ball) {
  return sobolev_seminorm(theta, r) <= A_ball * A_ball;
}

namespace {

void validate(const RateParams& p) {
  if (!(p.r > 0.0) || !(p.delta > 0.0) || !(p.M >= 1.0) || !(p.K >= 1.0))
    throw std::invalid_argument("rate parameters out of range");
  if (p.alpha > 0.0 && !(p.beta > 0.0))
    throw std::invalid_argument("exponential ill-posedness needs beta > 0");
}

double ln_clusters(double K) { return K > 1.0 ? std::log(K) : 0.0; }

}  // namespace

double rate_clustered(const RateParams& p) {
  validate(p);
  const double d2 = p.delta * p.delta;
  const double lnK = ln_clusters(p.K);
  if (p.alpha > 0.0) {
    double align = 0.0;
    if (lnK > 0.0) {
      const double arg = d2 * lnK;
      if (!(arg < 1.0))
        throw std::domain_error("severe regime needs delta^2 ln K < 1");
      align = std::pow(std::log(1.0 / arg), -2.0 * p.r / p.beta);
    }
    const double arg2 = p.M / (d2 * p.K);
    if (!(arg2 > 1.0))
      throw std::domain_error("severe regime needs M / (delta^2 K) > 1");
    return align + std::pow(std::log(arg2), -2.0 * p.r / p.beta);
  }
  const double align =
      lnK > 0.0 ? std::pow(d2 * lnK, 2.0 * p.r / (2.0 * p.r + 2.0 * p.gamma))
                : 0.0;
  return align +
         std::pow(d2 * p.K / p.M, 2.0 * p.r / (2.0 * p.r + 2.0 * p.gamma + 1.0));
}

double rate_unclustered(const RateParams& p) {
  validate(p);
  const double d2 = p.delta * p.delta;
  if (p.alpha > 0.0) {
    if (!(p.delta < 1.0))
      throw std::domain_error("severe regime needs delta < 1");
    return std::pow(std::log(1.0 / p.delta), -2.0 * p.r / p.beta);
  }
  return std::pow(d2, 2.0 * p.r / (2.0 * p.gamma + 2.0 * p.r + 1.0));
}

double clustering_advantage(const RateParams& p) {
  return rate_clustered(p) / rate_unclustered(p);
}

double oracle_bound_rhs(const CoefficientMatrix& G_true,
                        const ClusteringAssignment& Z, int L, int K,
                        const OperatorSpectrum& spectrum,
                        const PenaltyConfig& cfg) {
  const Eigen::Index n = G_true.values.rows();
  if (L < 0 || L > n) throw std::invalid_argument("oracle bound prefix out of range");
  Eigen::MatrixXd P = project_columns(G_true.values, Z);
  const double tail = P.bottomRows(n - L).squaredNorm();
  return 3.0 * tail + 4.0 * penalty_nested(L, K, spectrum, cfg);
}

double oracle_bound_min_rhs(const CoefficientMatrix& G_true,
                            const ClusteringAssignment& Z, int K,
                            const OperatorSpectrum& spectrum,
                            const PenaltyConfig& cfg, int L_max) {
  if (L_max < 1) throw std::invalid_argument("oracle bound needs L_max >= 1");
  double best = std::numeric_limits<double>::infinity();
  for (int L = 1; L <= L_max; ++L)
    best = std::min(best, oracle_bound_rhs(G_true, Z, L, K, spectrum, cfg));
  return best;
}

double gaussian_quadratic_tail(const Eigen::MatrixXd& A, double x, int trials,
                               std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("quadratic tail needs trials >= 1");
  const double trace = A.squaredNorm();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.transpose() * A);
  const double op2 = es.eigenvalues().size() > 0
                         ? std::max(0.0, es.eigenvalues().maxCoeff())
                         : 0.0;
  const double bound = trace + 2.0 * std::sqrt(op2 * trace * x) + 2.0 * op2 * x;
  Rng rng(seed);
  Eigen::VectorXd eps(A.cols());
  int exceed = 0;
  for (int t = 0; t < trials; ++t) {
    for (Eigen::Index i = 0; i < eps.size(); ++i) eps(i) = rng.normal();
    if ((A * eps).squaredNorm() > bound) ++exceed;
  }
  return static_cast<double>(exceed) / static_cast<double>(trials);
}

}  // namespace declust
