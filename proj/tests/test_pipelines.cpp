#include <doctest.h>

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "declust/pipelines.hpp"
#include "declust/rng.hpp"
#include "declust/signals.hpp"
#include "oracles.hpp"

using namespace declust;

namespace {

ProblemInstance smooth_instance(int n, int M, int K, double snr,
                                KernelSpec kernel, BasisKind basis,
                                std::uint64_t seed = 11) {
  auto funcs = function_set(FunctionSet::Smooth);
  funcs.resize(static_cast<std::size_t>(K));
  Rng r(seed);
  auto z = make_balanced_assignment(M, K, r);
  return build_instance(funcs, z, kernel, snr, basis);
}

}  // namespace

TEST_CASE("relative error definition") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(8, 3);
  Eigen::MatrixXd B = Eigen::MatrixXd::Ones(8, 3);
  CHECK(relative_error(A, B) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(relative_error(B, B) == 0.0);
  CHECK(relative_error((3.0 * B).eval(), B) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("operating band combines cutoff, cap, and usable prefix") {
  OperatorSpectrum sp;
  sp.nu = Eigen::VectorXd(6);
  sp.nu << 1, 2, 4, 8, 16, 32;
  sp.usable_prefix = 6;
  BandOptions opt;
  // delta = 0.5: sequence cutoff floor(1/0.25) = 4, cap 0.5 nu <= 3 stops at nu = 8
  CHECK(operating_band(0.5, sp, opt) == 3);
  opt.amplification_cap = 0.0;  // disabled
  CHECK(operating_band(0.5, sp, opt) == 4);
  opt.sequence_cutoff = false;
  CHECK(operating_band(0.5, sp, opt) == 6);
  opt = BandOptions{};
  // tiny delta: no limit binds except the usable prefix
  CHECK(operating_band(1e-9, sp, opt) == 6);
  // shorter usable prefix wins
  sp.usable_prefix = 2;
  CHECK(operating_band(1e-9, sp, opt) == 2);
  // huge delta: nothing usable
  sp.usable_prefix = 6;
  CHECK(operating_band(10.0, sp, opt) == 0);
}

TEST_CASE("sequence workspace: weights and band on the direct path") {
  ProblemInstance inst =
      smooth_instance(64, 8, 2, 5.0, KernelSpec::laplace(5.0), BasisKind::fourier(64));
  Eigen::MatrixXd X = simulate(inst, 3);
  PipelineConfig cfg;
  cfg.basis = BasisKind::fourier(64);
  cfg.noise_level = inst.sigma;
  SequenceWorkspace ws = prepare_sequence(X, inst, cfg);
  CHECK(ws.delta_hat == inst.sigma);
  CHECK(ws.band == operating_band(inst.sigma, inst.spectrum, cfg.band));
  CHECK(ws.band > 0);
  Eigen::MatrixXd Y = to_sequence(X, cfg.basis).values;
  CHECK((ws.fourier_Y - Y).cwiseAbs().maxCoeff() < 1e-12);
  for (std::size_t j = 0; j < 64; ++j) {
    auto jj = static_cast<Eigen::Index>(j);
    if (j < ws.band) {
      CHECK(ws.rho(jj) == doctest::Approx(inst.spectrum.nu(jj)).epsilon(1e-12));
      CHECK((ws.weighted.row(jj) - inst.spectrum.nu(jj) * Y.row(jj))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
    } else {
      CHECK(ws.rho(jj) == 0.0);
      CHECK(ws.weighted.row(jj).cwiseAbs().maxCoeff() == 0.0);
    }
  }
  // without an override the estimated level is used
  PipelineConfig cfg2;
  cfg2.basis = BasisKind::fourier(64);
  SequenceWorkspace ws2 = prepare_sequence(X, inst, cfg2);
  CHECK(ws2.delta_hat == doctest::Approx(estimate_noise_level(X)).epsilon(1e-12));
}

TEST_CASE("sequence workspace: wavelet path carries the composite weights") {
  const std::size_t n = 64;
  ProblemInstance inst = smooth_instance(static_cast<int>(n), 8, 2, 5.0,
                                         KernelSpec::laplace(5.0),
                                         BasisKind::daubechies8(n));
  Eigen::MatrixXd X = simulate(inst, 5);
  PipelineConfig cfg;
  cfg.basis = BasisKind::daubechies8(n);
  cfg.noise_level = inst.sigma;
  cfg.threshold.mode = ThresholdRule::Mode::Element;
  SequenceWorkspace ws = prepare_sequence(X, inst, cfg);
  // weighted data = wavelet analysis of the band-limited deconvolution
  BasisKind fourier = BasisKind::fourier(n);
  Eigen::MatrixXd Y = to_sequence(X, fourier).values;
  Eigen::VectorXd mask = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < ws.band; ++j) mask(static_cast<Eigen::Index>(j)) = 1.0;
  Eigen::MatrixXd UY = (inst.spectrum.nu.cwiseProduct(mask)).asDiagonal() * Y;
  Eigen::MatrixXd back(n, 8);
  for (int m = 0; m < 8; ++m)
    back.col(m) = synthesize(CoefficientVector{UY.col(m), fourier});
  Eigen::MatrixXd D = analyze_columns(back, cfg.basis).values;
  CHECK((ws.weighted - D).cwiseAbs().maxCoeff() < 1e-10);
  // rho_j = row norm of the composite map
  for (Eigen::Index j : {0, 5, 20, 63}) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    e(j) = 1.0;
    Eigen::VectorXd w = synthesize(CoefficientVector{e, cfg.basis});
    Eigen::VectorXd wf = analyze(w, fourier).values;
    double rho = (inst.spectrum.nu.cwiseProduct(mask).asDiagonal() * wf).norm();
    CHECK(ws.rho(j) == doctest::Approx(rho).epsilon(1e-10));
  }
}

TEST_CASE("noiseless runs recover the truth on mildly ill-posed problems") {
  // the noise floor is estimated from the data, so on noiseless input it is
  // a tiny positive number rather than zero; coefficients of the truth that
  // sit below that floor are clipped, which costs a commensurately tiny
  // error (observed ~2e-6 for the dense fine-scale wavelet coefficients,
  // ~1e-15 for the trigonometric basis where the truth is sparse)
  for (auto basis : {BasisKind::fourier(64), BasisKind::daubechies8(64)}) {
    ProblemInstance inst =
        smooth_instance(64, 12, 3, 5.0, KernelSpec::laplace(5.0), basis);
    inst.sigma = 0.0;
    Eigen::MatrixXd X = simulate(inst, 1);
    PipelineConfig cfg;
    cfg.basis = basis;
    if (basis.variant == BasisVariant::Daubechies8)
      cfg.threshold.mode = ThresholdRule::Mode::Element;
    PipelineOutput none = no_clustering(X, inst, cfg);
    CHECK(none.error <= 1e-5);
    PipelineOutput before = clustering_before(X, inst, 3, cfg);
    CHECK(before.error <= 1e-5);
    REQUIRE(before.miss.has_value());
    CHECK(*before.miss == 0.0);
    PipelineOutput after = clustering_after(X, inst, 3, cfg);
    CHECK(after.error <= 1e-5);
    REQUIRE(after.miss.has_value());
    CHECK(*after.miss == 0.0);
    CHECK(!none.miss.has_value());
    CHECK(!none.assignment.has_value());
  }
}

TEST_CASE("K = M clustering is a no-op: before and after collapse to none") {
  ProblemInstance inst =
      smooth_instance(64, 8, 2, 5.0, KernelSpec::laplace(5.0), BasisKind::fourier(64));
  Eigen::MatrixXd X = simulate(inst, 17);
  PipelineConfig cfg;
  cfg.basis = BasisKind::fourier(64);
  cfg.threshold.mode = ThresholdRule::Mode::Element;
  PipelineOutput none = no_clustering(X, inst, cfg);
  PipelineOutput before = clustering_before(X, inst, 8, cfg);
  PipelineOutput after = clustering_after(X, inst, 8, cfg);
  CHECK((before.F_hat - none.F_hat).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((after.F_hat - none.F_hat).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("pure noise is thresholded away") {
  const int n = 64, M = 20;
  ProblemInstance inst;
  inst.F_true = Eigen::MatrixXd::Zero(n, M);
  inst.Q_true = Eigen::MatrixXd::Zero(n, M);
  inst.basis = BasisKind::fourier(n);
  inst.G_true = CoefficientMatrix{Eigen::MatrixXd::Zero(n, M), inst.basis};
  inst.Z_true = ClusteringAssignment::from_labels(std::vector<int>(M, 0), 1);
  inst.K_true = 1;
  inst.sigma = 1.0;
  inst.kernel = KernelSpec::laplace(5.0);
  inst.spectrum = spectrum_from_kernel(inst.kernel, n);
  Eigen::MatrixXd X = simulate(inst, 4);
  PipelineConfig cfg;
  cfg.basis = inst.basis;
  PipelineOutput out = no_clustering(X, inst, cfg);
  CHECK(out.error < 0.2);
  // almost all rows die: surviving energy is a small fraction of the noise
  CHECK(out.F_hat.squaredNorm() < 0.05 * X.squaredNorm());
}

TEST_CASE("automatic K selection recovers the truth at high SNR") {
  ProblemInstance inst = smooth_instance(64, 12, 3, 1000.0, KernelSpec::laplace(5.0),
                                         BasisKind::fourier(64));
  Eigen::MatrixXd X = simulate(inst, 8);
  PipelineConfig cfg;
  cfg.basis = BasisKind::fourier(64);
  PipelineOutput out = clustering_before(X, inst, std::nullopt, cfg);
  REQUIRE(out.assignment.has_value());
  CHECK(out.assignment->K == 3);
  REQUIRE(out.miss.has_value());
  CHECK(*out.miss == 0.0);
  CHECK(out.error < 0.05);
}

TEST_CASE("cluster source options both work on well-separated data") {
  ProblemInstance inst =
      smooth_instance(64, 12, 3, 20.0, KernelSpec::laplace(3.0), BasisKind::fourier(64));
  Eigen::MatrixXd X = simulate(inst, 13);
  for (auto src : {ClusterSource::WeightedY, ClusterSource::RawY}) {
    PipelineConfig cfg;
    cfg.basis = BasisKind::fourier(64);
    cfg.cluster_on = src;
    PipelineOutput out = clustering_before(X, inst, 3, cfg);
    REQUIRE(out.miss.has_value());
    CHECK(*out.miss == 0.0);
  }
}

TEST_CASE("pipelines are deterministic in the seed and config") {
  ProblemInstance inst =
      smooth_instance(64, 12, 3, 3.0, KernelSpec::laplace(5.0), BasisKind::fourier(64));
  Eigen::MatrixXd X = simulate(inst, 21);
  PipelineConfig cfg;
  cfg.basis = BasisKind::fourier(64);
  cfg.kmeans.seed = 9;
  PipelineOutput a = clustering_before(X, inst, 3, cfg);
  PipelineOutput b = clustering_before(X, inst, 3, cfg);
  CHECK((a.F_hat - b.F_hat).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.assignment->labels == b.assignment->labels);
  PipelineOutput c = clustering_after(X, inst, 3, cfg);
  PipelineOutput d = clustering_after(X, inst, 3, cfg);
  CHECK((c.F_hat - d.F_hat).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("severely ill-posed runs stay band-limited") {
  // the surviving band here is tiny (constant plus the lowest frequency
  // pair), so pick generators with energy at those rows: the polynomial
  // members of the smooth set. The pure sine members live entirely at
  // frequency 2, which the band excludes, and would make the zero estimate
  // the in-band optimum.
  auto all = function_set(FunctionSet::Smooth);
  std::vector<std::function<double(double)>> funcs = {all[2], all[3]};
  Rng r(11);
  auto z = make_balanced_assignment(8, 2, r);
  ProblemInstance inst = build_instance(funcs, z, KernelSpec::gaussian(10.0), 5.0,
                                        BasisKind::fourier(128));
  Eigen::MatrixXd X = simulate(inst, 2);
  PipelineConfig cfg;
  cfg.basis = BasisKind::fourier(128);
  SequenceWorkspace ws = prepare_sequence(X, inst, cfg);
  CHECK(ws.band < 128);
  PipelineOutput out = no_clustering(X, inst, cfg);
  Eigen::MatrixXd coefs = to_sequence(out.F_hat, cfg.basis).values;
  for (std::size_t j = ws.band; j < 128; ++j)
    CHECK(coefs.row(static_cast<Eigen::Index>(j)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(out.error < 1.0);
}

TEST_CASE("clustering before estimation beats per-column estimation on average") {
  double acc_before = 0.0, acc_none = 0.0;
  const int reps = 3;
  ProblemInstance inst = smooth_instance(256, 60, 4, 5.0, KernelSpec::laplace(5.0),
                                         BasisKind::fourier(256));
  for (int rep = 0; rep < reps; ++rep) {
    Eigen::MatrixXd X = simulate(inst, 300 + static_cast<std::uint64_t>(rep));
    PipelineConfig cfg;
    cfg.basis = BasisKind::fourier(256);
    cfg.cluster_on = ClusterSource::RawY;
    cfg.kmeans.seed = static_cast<std::uint64_t>(rep);
    acc_before += clustering_before(X, inst, 4, cfg).error;
    acc_none += no_clustering(X, inst, cfg).error;
  }
  CHECK(acc_before < acc_none);
}
