#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "declust/bench.hpp"

namespace {

using namespace declust;

struct ConfigFlags {
  std::string config_file;
  std::optional<std::string> kernel;
  std::optional<double> lambda;
  std::optional<double> snr;
  std::optional<std::string> set;
  std::optional<int> n;
  std::optional<int> M;
  std::optional<int> K;
  std::optional<int> replications;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> pipelines;
  std::optional<bool> k_auto;
  std::optional<std::string> threshold_mode;
  std::optional<double> multiplier;
  std::optional<std::string> cluster_on;
  std::optional<int> restarts;
  std::optional<double> noise_level;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("--config", f.config_file, "JSON configuration file");
  cmd->add_option("--kernel", f.kernel, "kernel family: laplace | gaussian");
  cmd->add_option("--lambda", f.lambda, "kernel length-scale parameter");
  cmd->add_option("--snr", f.snr, "signal-to-noise ratio");
  cmd->add_option("--set", f.set, "function set: smooth | nonsmooth");
  cmd->add_option("--n", f.n, "grid size (power of two, >= 16)");
  cmd->add_option("--M", f.M, "number of observed curves");
  cmd->add_option("--K", f.K, "number of clusters (divides M)");
  cmd->add_option("--replications", f.replications, "Monte Carlo replications");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--pipelines", f.pipelines,
                  "comma list from before,after,none");
  cmd->add_option("--k-auto", f.k_auto,
                  "select K by the penalized joint solver (true/false)");
  cmd->add_option("--threshold-mode", f.threshold_mode,
                  "clustered-fit threshold: row | element");
  cmd->add_option("--multiplier", f.multiplier, "threshold multiplier");
  cmd->add_option("--cluster-on", f.cluster_on,
                  "clustering input: raw_y | weighted_y");
  cmd->add_option("--restarts", f.restarts, "k-means restarts");
  cmd->add_option("--noise-level", f.noise_level,
                  "override the estimated noise level");
}

ExperimentConfig resolve_config(const ConfigFlags& f) {
  ExperimentConfig cfg;
  bool from_file = !f.config_file.empty();
  if (from_file) {
    std::ifstream in(f.config_file);
    if (!in) throw std::runtime_error("cannot open config file " + f.config_file);
    cfg = experiment_config_from_json(nlohmann::json::parse(in));
  }
  // flags override file values; without a file they fill a fresh default
  KernelSpec kernel = cfg.kernel;
  if (f.kernel || f.lambda) {
    std::string family = f.kernel.value_or(
        cfg.kernel.family == KernelFamily::Laplace ? "laplace" : "gaussian");
    double lambda = f.lambda.value_or(cfg.kernel.lambda);
    if (family == "laplace")
      kernel = KernelSpec::laplace(lambda);
    else if (family == "gaussian")
      kernel = KernelSpec::gaussian(lambda);
    else
      throw std::runtime_error("unknown kernel family: " + family);
  }
  FunctionSet set = cfg.set;
  if (f.set) {
    if (*f.set == "smooth")
      set = FunctionSet::Smooth;
    else if (*f.set == "nonsmooth")
      set = FunctionSet::Nonsmooth;
    else
      throw std::runtime_error("unknown function set: " + *f.set);
  }
  // rebuild through the factory so basis/threshold defaults track the set
  bool structural = !from_file || f.kernel || f.lambda || f.set || f.n ||
                    f.M || f.K || f.replications || f.seed;
  if (structural) {
    ExperimentConfig base = make_experiment_config(
        kernel, f.snr.value_or(cfg.snr), set, f.n.value_or(cfg.n),
        f.M.value_or(cfg.M), f.K.value_or(cfg.K),
        f.replications.value_or(cfg.replications), f.seed.value_or(cfg.seed));
    if (from_file) {
      base.pipelines = cfg.pipelines;
      base.k_auto = cfg.k_auto;
      base.pipe.threshold.multiplier = cfg.pipe.threshold.multiplier;
      base.pipe.cluster_on = cfg.pipe.cluster_on;
      base.pipe.band = cfg.pipe.band;
      base.pipe.kmeans = cfg.pipe.kmeans;
      base.pipe.noise_level = cfg.pipe.noise_level;
      base.pipe.tau = cfg.pipe.tau;
      if (!f.set && !f.n) base.pipe.basis = cfg.pipe.basis;
      if (!f.set) base.pipe.threshold.mode = cfg.pipe.threshold.mode;
    }
    cfg = base;
  } else if (f.snr) {
    cfg.snr = *f.snr;
  }
  if (f.pipelines) {
    cfg.pipelines.clear();
    std::istringstream ss(*f.pipelines);
    std::string name;
    while (std::getline(ss, name, ',')) {
      if (name == "before")
        cfg.pipelines.push_back(PipelineId::Before);
      else if (name == "after")
        cfg.pipelines.push_back(PipelineId::After);
      else if (name == "none")
        cfg.pipelines.push_back(PipelineId::None);
      else
        throw std::runtime_error("unknown pipeline: " + name);
    }
    if (cfg.pipelines.empty()) throw std::runtime_error("empty pipeline list");
  }
  if (f.k_auto) cfg.k_auto = *f.k_auto;
  if (f.threshold_mode) {
    if (*f.threshold_mode == "row")
      cfg.pipe.threshold.mode = ThresholdRule::Mode::Row;
    else if (*f.threshold_mode == "element")
      cfg.pipe.threshold.mode = ThresholdRule::Mode::Element;
    else
      throw std::runtime_error("unknown threshold mode: " + *f.threshold_mode);
  }
  if (f.multiplier) cfg.pipe.threshold.multiplier = *f.multiplier;
  if (f.cluster_on) {
    if (*f.cluster_on == "raw_y")
      cfg.pipe.cluster_on = ClusterSource::RawY;
    else if (*f.cluster_on == "weighted_y")
      cfg.pipe.cluster_on = ClusterSource::WeightedY;
    else
      throw std::runtime_error("unknown cluster source: " + *f.cluster_on);
  }
  if (f.restarts) cfg.pipe.kmeans.restarts = *f.restarts;
  if (f.noise_level) cfg.pipe.noise_level = *f.noise_level;
  return cfg;
}

void apply_threads(int threads) {
  if (threads > 0) {
    setenv("DECLUST_THREADS", std::to_string(threads).c_str(), 1);
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  if (out.empty()) throw std::runtime_error("empty numeric list");
  return out;
}

int cmd_run(const ConfigFlags& flags, const std::string& out_dir, int threads) {
  apply_threads(threads);
  ExperimentConfig cfg = resolve_config(flags);
  ExperimentReport report = run_experiment(cfg);
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream out(fs::path(out_dir) / "report.json");
    if (!out) throw std::runtime_error("cannot write report.json in " + out_dir);
    out << to_json(report).dump(2) << "\n";
  }
  {
    std::ofstream out(fs::path(out_dir) / "report.csv");
    if (!out) throw std::runtime_error("cannot write report.csv in " + out_dir);
    out << emit_csv({report});
  }
  std::cout << emit_text_table(report);
  return 0;
}

int cmd_tables(const std::string& out_dir, int replications, std::uint64_t seed,
               int threads) {
  apply_threads(threads);
  write_benchmark_tables(out_dir, replications, seed);
  std::cout << "wrote benchmark tables to " << out_dir << "\n";
  return 0;
}

int cmd_figures(const ConfigFlags& flags, const std::string& out_dir,
                int threads) {
  apply_threads(threads);
  ExperimentConfig cfg = resolve_config(flags);
  write_curve_data(cfg, out_dir);
  std::cout << "wrote curve data for " << cfg.K << " cluster representatives to "
            << out_dir << "\n";
  return 0;
}

int cmd_rates(const std::string& out_file, double r, double gamma, double alpha,
              double beta, const std::string& deltas, const std::string& Ks,
              const std::string& Ms) {
  std::vector<RateParams> grid;
  for (double M : parse_list(Ms))
    for (double K : parse_list(Ks))
      for (double delta : parse_list(deltas)) {
        RateParams p;
        p.r = r;
        p.gamma = gamma;
        p.alpha = alpha;
        p.beta = beta;
        p.M = M;
        p.K = K;
        p.delta = delta;
        grid.push_back(p);
      }
  if (out_file.empty()) {
    write_rate_sweep(grid, std::cout);
  } else {
    std::ofstream out(out_file);
    if (!out) throw std::runtime_error("cannot write " + out_file);
    write_rate_sweep(grid, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"penalized clustering for families of inverse problems"};
  app.require_subcommand(1);

  ConfigFlags run_flags;
  std::string run_out;
  int run_threads = 0;
  CLI::App* run = app.add_subcommand("run", "run one experiment configuration");
  add_config_flags(run, run_flags);
  run->add_option("--out", run_out, "output directory")->required();
  run->add_option("--threads", run_threads, "worker threads (default: all cores)");

  std::string tables_out;
  int tables_reps = 100;
  std::uint64_t tables_seed = 1;
  int tables_threads = 0;
  CLI::App* tables =
      app.add_subcommand("tables", "run the full benchmark grid");
  tables->add_option("--out", tables_out, "output directory")->required();
  tables->add_option("--replications", tables_reps, "replications per cell");
  tables->add_option("--seed", tables_seed, "master seed");
  tables->add_option("--threads", tables_threads, "worker threads");

  ConfigFlags fig_flags;
  std::string fig_out;
  int fig_threads = 0;
  CLI::App* figures =
      app.add_subcommand("figures", "write estimator curves for one seeded run");
  add_config_flags(figures, fig_flags);
  figures->add_option("--out", fig_out, "output directory")->required();
  figures->add_option("--threads", fig_threads, "worker threads");

  std::string rates_out;
  double rates_r = 1.0, rates_gamma = 1.0, rates_alpha = 0.0, rates_beta = 0.0;
  std::string rates_deltas = "0.1,0.05,0.01";
  std::string rates_Ks = "1,2,4";
  std::string rates_Ms = "1000,10000";
  CLI::App* rates =
      app.add_subcommand("rates", "tabulate closed-form risk rates");
  rates->add_option("--out", rates_out, "output CSV file (default: stdout)");
  rates->add_option("--r", rates_r, "smoothness exponent");
  rates->add_option("--gamma", rates_gamma, "polynomial ill-posedness degree");
  rates->add_option("--alpha", rates_alpha, "exponential ill-posedness scale");
  rates->add_option("--beta", rates_beta, "exponential ill-posedness exponent");
  rates->add_option("--delta", rates_deltas, "comma list of noise levels");
  rates->add_option("--K", rates_Ks, "comma list of cluster counts");
  rates->add_option("--M", rates_Ms, "comma list of family sizes");

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(run_flags, run_out, run_threads);
    if (tables->parsed())
      return cmd_tables(tables_out, tables_reps, tables_seed, tables_threads);
    if (figures->parsed()) return cmd_figures(fig_flags, fig_out, fig_threads);
    if (rates->parsed())
      return cmd_rates(rates_out, rates_r, rates_gamma, rates_alpha, rates_beta,
                       rates_deltas, rates_Ks, rates_Ms);
    return 1;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    nlohmann::json err{{"error", e.what()}, {"kind", "usage"}};
    std::cerr << err.dump() << "\n";
    return e.get_exit_code() == 0 ? 1 : e.get_exit_code();
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", e.what()}, {"kind", "runtime"}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
