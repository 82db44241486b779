#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "declust/clustering.hpp"
#include "declust/selection.hpp"
#include "declust/transforms.hpp"

namespace declust {

// Parameters of the closed-form risk expressions. Smoothness r > 0;
// ill-posedness exponents: polynomial degree gamma, exponential alpha/beta
// (alpha = beta = 0 is the moderately ill-posed regime; alpha > 0 requires
// beta > 0). K = 1 uses the convention ln K := 0.
struct RateParams {
  double r = 1.0;
  double gamma = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double A_ball = 1.0;
  double M = 1.0;
  double K = 1.0;
  double delta = 0.1;
};

// sum_j theta_j^2 j^{2r} (1-based index).
double sobolev_seminorm(const Eigen::VectorXd& theta, double r);
bool in_sobolev_ball(const Eigen::VectorXd& theta, double r, double A_ball);

// Risk of the clustered estimator:
//   (delta^2 ln K)^{2r/(2r+2gamma)} + (delta^2 K / M)^{2r/(2r+2gamma+1)}
// in the polynomial regime, and
//   [ln(1/(delta^2 ln K))]^{-2r/beta} + [ln(M/(delta^2 K))]^{-2r/beta}
// in the severe regime. Severe-regime logs require delta^2 ln K < 1 and
// M/(delta^2 K) > 1; violations throw std::domain_error.
double rate_clustered(const RateParams& params);

// Risk without clustering: (delta^2)^{2r/(2gamma+2r+1)} polynomial,
// [ln(1/delta)]^{-2r/beta} severe.
double rate_unclustered(const RateParams& params);

// Direct quotient rate_clustered / rate_unclustered.
double clustering_advantage(const RateParams& params);

// 3 ||(W_L - I) G_true Pi_Z||_F^2 + 4 penalty_nested(L, K): the bound's
// right-hand side at one candidate (Z, L, K).
double oracle_bound_rhs(const CoefficientMatrix& G_true,
                        const ClusteringAssignment& Z, int L, int K,
                        const OperatorSpectrum& spectrum,
                        const PenaltyConfig& cfg);

// Minimum of oracle_bound_rhs over L = 1..L_max at fixed (Z, K).
double oracle_bound_min_rhs(const CoefficientMatrix& G_true,
                            const ClusteringAssignment& Z, int K,
                            const OperatorSpectrum& spectrum,
                            const PenaltyConfig& cfg, int L_max);

// Monte Carlo frequency of ||A eps||^2 exceeding
//   Tr(A^T A) + 2 sqrt(||A||_op^2 Tr(A^T A) x) + 2 ||A||_op^2 x
// over `trials` standard-normal vectors eps.
double gaussian_quadratic_tail(const Eigen::MatrixXd& A, double x, int trials,
                               std::uint64_t seed);

}  // namespace declust
