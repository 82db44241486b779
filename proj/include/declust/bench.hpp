#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "declust/pipelines.hpp"
#include "declust/signals.hpp"
#include "declust/theory.hpp"

namespace declust {

enum class PipelineId { Before, After, None };

std::string pipeline_name(PipelineId id);

struct ExperimentConfig {
  KernelSpec kernel = KernelSpec::laplace(5.0);
  double snr = 5.0;
  FunctionSet set = FunctionSet::Smooth;
  int n = 256;
  int M = 60;
  int K = 4;
  int replications = 100;
  std::uint64_t seed = 1;
  std::vector<PipelineId> pipelines{PipelineId::Before, PipelineId::After,
                                    PipelineId::None};
  bool k_auto = false;
  PipelineConfig pipe;  // basis/threshold defaults follow `set` and `n`
};

// Benchmark defaults: smooth sets estimate in the Fourier basis with
// row thresholds for the clustered fit, nonsmooth sets in the Daubechies-8
// basis with element thresholds; clustering runs on the band-limited raw
// data. The unclustered fit always thresholds elements.
ExperimentConfig make_experiment_config(const KernelSpec& kernel, double snr,
                                        FunctionSet set, int n = 256,
                                        int M = 60, int K = 4,
                                        int replications = 100,
                                        std::uint64_t seed = 1);

struct PipelineStats {
  double mean_error = 0.0;
  double sd_of_mean = 0.0;   // sample SD of per-replication errors / sqrt(reps)
  double mean_miss = 0.0;
  bool has_miss = false;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<std::pair<PipelineId, PipelineStats>> stats;
  double seconds = 0.0;
  std::string config_hash;

  const PipelineStats& of(PipelineId id) const;
};

// Monte Carlo over config.replications: fresh balanced assignment and fresh
// noise per replication, deterministic given config.seed. Replications run
// concurrently; aggregation is in replication order.
ExperimentReport run_experiment(const ExperimentConfig& config);

// FNV-1a 64-bit hex digest of the canonical JSON serialization of config;
// changes iff some field changes.
std::string config_hash(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentReport& report);

// CSV with one row per (config, pipeline); fixed column order, stable
// formatting (see docs in bench.cpp). parse_report_csv inverts emit_csv.
std::string emit_csv(const std::vector<ExperimentReport>& reports);
std::vector<std::vector<std::string>> parse_csv(const std::string& text);
std::string emit_text_table(const ExperimentReport& report);

// Minimal JSON-schema subset validator (type/properties/required/items) for
// the shipped report schema.
bool validate_against_schema(const nlohmann::json& doc,
                             const nlohmann::json& schema,
                             std::string* error = nullptr);

// The full benchmark grid: moderately ill-posed (Laplace lambda in {3,5,7} x
// SNR in {3,5,7}) and severely ill-posed (Gaussian lambda in {10,12,15} x
// SNR in {5,7,10}), each with the smooth and nonsmooth sets. Writes four CSV
// documents into out_dir: smooth_moderate.csv, smooth_severe.csv,
// nonsmooth_moderate.csv, nonsmooth_severe.csv. Rerunning with the same
// master seed reproduces the files byte for byte.
void write_benchmark_tables(const std::string& out_dir, int replications,
                            std::uint64_t seed);

// One seeded run per cluster representative: writes
// curves_<kernel>_<set>_k<k>.csv files with columns x, truth, and one column
// per requested pipeline.
void write_curve_data(const ExperimentConfig& config, const std::string& out_dir);

// Rate-sweep CSV: columns M, K, delta, r, gamma, alpha, beta,
// rate_clustered, rate_unclustered, ratio.
void write_rate_sweep(const std::vector<RateParams>& grid, std::ostream& out);

}  // namespace declust
