#include "declust/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "declust/parallel.hpp"
#include "declust/rng.hpp"

namespace declust {

namespace {

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string kernel_family_name(KernelFamily f) {
  return f == KernelFamily::Laplace ? "laplace" : "gaussian";
}

std::string set_name(FunctionSet s) {
  return s == FunctionSet::Smooth ? "smooth" : "nonsmooth";
}

std::string basis_name(BasisVariant v) {
  return v == BasisVariant::Fourier ? "fourier" : "daubechies8";
}

std::string mode_name(ThresholdRule::Mode m) {
  return m == ThresholdRule::Mode::Row ? "row" : "element";
}

std::string source_name(ClusterSource s) {
  return s == ClusterSource::WeightedY ? "weighted_y" : "raw_y";
}

PipelineId pipeline_from_name(const std::string& name) {
  if (name == "before") return PipelineId::Before;
  if (name == "after") return PipelineId::After;
  if (name == "none") return PipelineId::None;
  throw std::invalid_argument("unknown pipeline name: " + name);
}

}  // namespace

std::string pipeline_name(PipelineId id) {
  switch (id) {
    case PipelineId::Before:
      return "before";
    case PipelineId::After:
      return "after";
    case PipelineId::None:
      return "none";
  }
  throw std::invalid_argument("unknown pipeline id");
}

ExperimentConfig make_experiment_config(const KernelSpec& kernel, double snr,
                                        FunctionSet set, int n, int M, int K,
                                        int replications, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.kernel = kernel;
  cfg.snr = snr;
  cfg.set = set;
  cfg.n = n;
  cfg.M = M;
  cfg.K = K;
  cfg.replications = replications;
  cfg.seed = seed;
  const auto nn = static_cast<std::size_t>(n);
  if (set == FunctionSet::Smooth) {
    cfg.pipe.basis = BasisKind::fourier(nn);
    cfg.pipe.threshold.mode = ThresholdRule::Mode::Row;
  } else {
    cfg.pipe.basis = BasisKind::daubechies8(nn);
    cfg.pipe.threshold.mode = ThresholdRule::Mode::Element;
  }
  cfg.pipe.cluster_on = ClusterSource::RawY;
  return cfg;
}

const PipelineStats& ExperimentReport::of(PipelineId id) const {
  for (const auto& [pid, st] : stats)
    if (pid == id) return st;
  throw std::out_of_range("pipeline not present in report: " + pipeline_name(id));
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  if (config.replications < 1)
    throw std::invalid_argument("run_experiment: replications >= 1");
  if (config.pipelines.empty())
    throw std::invalid_argument("run_experiment: no pipelines requested");
  auto funcs = function_set(config.set);
  if (config.K < 1 || static_cast<std::size_t>(config.K) > funcs.size())
    throw std::invalid_argument("run_experiment: K outside the function set");
  funcs.resize(static_cast<std::size_t>(config.K));

  const auto R = static_cast<std::size_t>(config.replications);
  const std::size_t P = config.pipelines.size();
  std::vector<double> errors(R * P, 0.0);
  std::vector<double> misses(R * P, 0.0);

  parallel_for(0, R, [&](std::size_t rep) {
    const std::uint64_t rep_seed = split_seed(config.seed, rep);
    Rng assign_rng(split_seed(rep_seed, 0));
    ClusteringAssignment Z =
        make_balanced_assignment(config.M, config.K, assign_rng);
    ProblemInstance inst =
        build_instance(funcs, Z, config.kernel, config.snr, config.pipe.basis);
    Eigen::MatrixXd X = simulate(inst, split_seed(rep_seed, 1));
    for (std::size_t p = 0; p < P; ++p) {
      PipelineConfig pc = config.pipe;
      PipelineOutput out;
      switch (config.pipelines[p]) {
        case PipelineId::Before:
          pc.kmeans.seed = split_seed(rep_seed, 2);
          out = clustering_before(
              X, inst,
              config.k_auto ? std::nullopt : std::optional<int>(config.K), pc);
          break;
        case PipelineId::After:
          pc.kmeans.seed = split_seed(rep_seed, 3);
          out = clustering_after(X, inst, config.K, pc);
          break;
        case PipelineId::None:
          out = no_clustering(X, inst, pc);
          break;
      }
      errors[rep * P + p] = out.error;
      misses[rep * P + p] = out.miss ? *out.miss : 0.0;
    }
  });

  ExperimentReport report;
  report.config = config;
  report.config_hash = config_hash(config);
  for (std::size_t p = 0; p < P; ++p) {
    PipelineStats st;
    double sum = 0.0;
    for (std::size_t rep = 0; rep < R; ++rep) sum += errors[rep * P + p];
    st.mean_error = sum / static_cast<double>(R);
    if (R > 1) {
      double ss = 0.0;
      for (std::size_t rep = 0; rep < R; ++rep) {
        double d = errors[rep * P + p] - st.mean_error;
        ss += d * d;
      }
      st.sd_of_mean =
          std::sqrt(ss / static_cast<double>(R - 1) / static_cast<double>(R));
    }
    st.has_miss = config.pipelines[p] != PipelineId::None;
    if (st.has_miss) {
      double ms = 0.0;
      for (std::size_t rep = 0; rep < R; ++rep) ms += misses[rep * P + p];
      st.mean_miss = ms / static_cast<double>(R);
    }
    report.stats.emplace_back(config.pipelines[p], st);
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

nlohmann::json to_json(const ExperimentConfig& config) {
  nlohmann::json pipelines = nlohmann::json::array();
  for (PipelineId id : config.pipelines) pipelines.push_back(pipeline_name(id));
  nlohmann::json pipe{
      {"basis",
       {{"variant", basis_name(config.pipe.basis.variant)},
        {"n", config.pipe.basis.n}}},
      {"threshold",
       {{"mode", mode_name(config.pipe.threshold.mode)},
        {"multiplier", config.pipe.threshold.multiplier}}},
      {"cluster_on", source_name(config.pipe.cluster_on)},
      {"band",
       {{"sequence_cutoff", config.pipe.band.sequence_cutoff},
        {"amplification_cap", config.pipe.band.amplification_cap}}},
      {"kmeans",
       {{"restarts", config.pipe.kmeans.restarts},
        {"max_iters", config.pipe.kmeans.max_iters},
        {"tol", config.pipe.kmeans.tol},
        {"seed", config.pipe.kmeans.seed}}},
      {"noise_level", config.pipe.noise_level
                          ? nlohmann::json(*config.pipe.noise_level)
                          : nlohmann::json(nullptr)},
      {"tau", config.pipe.tau}};
  return nlohmann::json{
      {"kernel",
       {{"family", kernel_family_name(config.kernel.family)},
        {"lambda", config.kernel.lambda},
        {"domain_scale", config.kernel.domain_scale}}},
      {"snr", config.snr},
      {"set", set_name(config.set)},
      {"n", config.n},
      {"M", config.M},
      {"K", config.K},
      {"replications", config.replications},
      {"seed", config.seed},
      {"pipelines", pipelines},
      {"k_auto", config.k_auto},
      {"pipe", pipe}};
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  const auto& k = j.at("kernel");
  const std::string family = k.at("family").get<std::string>();
  const double lambda = k.at("lambda").get<double>();
  if (family == "laplace")
    cfg.kernel = KernelSpec::laplace(lambda);
  else if (family == "gaussian")
    cfg.kernel = KernelSpec::gaussian(lambda);
  else
    throw std::invalid_argument("unknown kernel family: " + family);
  cfg.snr = j.at("snr").get<double>();
  const std::string set = j.at("set").get<std::string>();
  if (set == "smooth")
    cfg.set = FunctionSet::Smooth;
  else if (set == "nonsmooth")
    cfg.set = FunctionSet::Nonsmooth;
  else
    throw std::invalid_argument("unknown function set: " + set);
  cfg.n = j.at("n").get<int>();
  cfg.M = j.at("M").get<int>();
  cfg.K = j.at("K").get<int>();
  cfg.replications = j.at("replications").get<int>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.pipelines.clear();
  for (const auto& name : j.at("pipelines"))
    cfg.pipelines.push_back(pipeline_from_name(name.get<std::string>()));
  cfg.k_auto = j.at("k_auto").get<bool>();
  const auto& pipe = j.at("pipe");
  const auto& basis = pipe.at("basis");
  const std::string variant = basis.at("variant").get<std::string>();
  const auto bn = basis.at("n").get<std::size_t>();
  if (variant == "fourier")
    cfg.pipe.basis = BasisKind::fourier(bn);
  else if (variant == "daubechies8")
    cfg.pipe.basis = BasisKind::daubechies8(bn);
  else
    throw std::invalid_argument("unknown basis variant: " + variant);
  const auto& th = pipe.at("threshold");
  const std::string mode = th.at("mode").get<std::string>();
  if (mode == "row")
    cfg.pipe.threshold.mode = ThresholdRule::Mode::Row;
  else if (mode == "element")
    cfg.pipe.threshold.mode = ThresholdRule::Mode::Element;
  else
    throw std::invalid_argument("unknown threshold mode: " + mode);
  cfg.pipe.threshold.multiplier = th.at("multiplier").get<double>();
  const std::string src = pipe.at("cluster_on").get<std::string>();
  if (src == "weighted_y")
    cfg.pipe.cluster_on = ClusterSource::WeightedY;
  else if (src == "raw_y")
    cfg.pipe.cluster_on = ClusterSource::RawY;
  else
    throw std::invalid_argument("unknown cluster source: " + src);
  const auto& band = pipe.at("band");
  cfg.pipe.band.sequence_cutoff = band.at("sequence_cutoff").get<bool>();
  cfg.pipe.band.amplification_cap = band.at("amplification_cap").get<double>();
  const auto& km = pipe.at("kmeans");
  cfg.pipe.kmeans.restarts = km.at("restarts").get<int>();
  cfg.pipe.kmeans.max_iters = km.at("max_iters").get<int>();
  cfg.pipe.kmeans.tol = km.at("tol").get<double>();
  cfg.pipe.kmeans.seed = km.at("seed").get<std::uint64_t>();
  const auto& noise = pipe.at("noise_level");
  cfg.pipe.noise_level =
      noise.is_null() ? std::nullopt : std::optional<double>(noise.get<double>());
  cfg.pipe.tau = pipe.at("tau").get<double>();
  return cfg;
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string canon = to_json(config).dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json to_json(const ExperimentReport& report) {
  nlohmann::json stats = nlohmann::json::array();
  for (const auto& [id, st] : report.stats)
    stats.push_back({{"pipeline", pipeline_name(id)},
                     {"mean_error", st.mean_error},
                     {"sd_of_mean", st.sd_of_mean},
                     {"mean_miss", st.mean_miss},
                     {"has_miss", st.has_miss}});
  return nlohmann::json{{"config", to_json(report.config)},
                        {"config_hash", report.config_hash},
                        {"seconds", report.seconds},
                        {"stats", stats}};
}

std::string emit_csv(const std::vector<ExperimentReport>& reports) {
  std::ostringstream out;
  out << "kernel,lambda,snr,set,n,M,K,pipeline,mean_error,sd_of_mean,"
         "mean_miss,replications,seed,config_hash\n";
  for (const auto& rep : reports) {
    const ExperimentConfig& c = rep.config;
    for (const auto& [id, st] : rep.stats) {
      out << kernel_family_name(c.kernel.family) << ',' << fmt_num(c.kernel.lambda)
          << ',' << fmt_num(c.snr) << ',' << set_name(c.set) << ',' << c.n << ','
          << c.M << ',' << c.K << ',' << pipeline_name(id) << ','
          << fmt_num(st.mean_error) << ',' << fmt_num(st.sd_of_mean) << ','
          << fmt_num(st.mean_miss) << ',' << c.replications << ',' << c.seed
          << ',' << rep.config_hash << '\n';
    }
  }
  return out.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::vector<std::string> row;
    std::string field;
    std::istringstream fs(line);
    while (std::getline(fs, field, ',')) row.push_back(field);
    if (!line.empty() && line.back() == ',') row.emplace_back();
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string emit_text_table(const ExperimentReport& report) {
  const ExperimentConfig& c = report.config;
  std::ostringstream out;
  out << kernel_family_name(c.kernel.family) << " lambda=" << fmt_num(c.kernel.lambda)
      << " snr=" << fmt_num(c.snr) << " set=" << set_name(c.set) << " n=" << c.n
      << " M=" << c.M << " K=" << c.K << " reps=" << c.replications
      << " hash=" << report.config_hash << "\n";
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-8s  %12s  %12s  %8s\n", "pipeline",
                "mean_error", "sd_of_mean", "miss");
  out << buf;
  for (const auto& [id, st] : report.stats) {
    if (st.has_miss)
      std::snprintf(buf, sizeof(buf), "%-8s  %12.5f  %12.5f  %8.4f\n",
                    pipeline_name(id).c_str(), st.mean_error, st.sd_of_mean,
                    st.mean_miss);
    else
      std::snprintf(buf, sizeof(buf), "%-8s  %12.5f  %12.5f  %8s\n",
                    pipeline_name(id).c_str(), st.mean_error, st.sd_of_mean, "-");
    out << buf;
  }
  return out.str();
}

namespace {

bool validate_node(const nlohmann::json& doc, const nlohmann::json& schema,
                   const std::string& path, std::string* error) {
  auto fail = [&](const std::string& msg) {
    if (error) *error = path + ": " + msg;
    return false;
  };
  if (schema.contains("type")) {
    const std::string t = schema.at("type").get<std::string>();
    bool ok = true;
    if (t == "object")
      ok = doc.is_object();
    else if (t == "array")
      ok = doc.is_array();
    else if (t == "string")
      ok = doc.is_string();
    else if (t == "number")
      ok = doc.is_number();
    else if (t == "integer")
      ok = doc.is_number_integer();
    else if (t == "boolean")
      ok = doc.is_boolean();
    else if (t == "null")
      ok = doc.is_null();
    if (!ok) return fail("expected type " + t);
  }
  if (doc.is_object()) {
    if (schema.contains("required"))
      for (const auto& key : schema.at("required")) {
        const std::string k = key.get<std::string>();
        if (!doc.contains(k)) return fail("missing required member " + k);
      }
    if (schema.contains("properties"))
      for (const auto& [k, sub] : schema.at("properties").items())
        if (doc.contains(k) &&
            !validate_node(doc.at(k), sub, path + "/" + k, error))
          return false;
  }
  if (doc.is_array() && schema.contains("items")) {
    for (std::size_t i = 0; i < doc.size(); ++i)
      if (!validate_node(doc[i], schema.at("items"),
                         path + "/" + std::to_string(i), error))
        return false;
  }
  return true;
}

}  // namespace

bool validate_against_schema(const nlohmann::json& doc,
                             const nlohmann::json& schema, std::string* error) {
  if (error) error->clear();
  return validate_node(doc, schema, "#", error);
}

void write_benchmark_tables(const std::string& out_dir, int replications,
                            std::uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  struct Grid {
    const char* file;
    KernelFamily family;
    std::vector<double> lambdas;
    std::vector<double> snrs;
    FunctionSet set;
  };
  const std::vector<Grid> grids = {
      {"smooth_moderate.csv", KernelFamily::Laplace, {3, 5, 7}, {3, 5, 7},
       FunctionSet::Smooth},
      {"smooth_severe.csv", KernelFamily::Gaussian, {10, 12, 15}, {5, 7, 10},
       FunctionSet::Smooth},
      {"nonsmooth_moderate.csv", KernelFamily::Laplace, {3, 5, 7}, {3, 5, 7},
       FunctionSet::Nonsmooth},
      {"nonsmooth_severe.csv", KernelFamily::Gaussian, {10, 12, 15}, {5, 7, 10},
       FunctionSet::Nonsmooth},
  };
  std::uint64_t cell_index = 0;
  for (const Grid& g : grids) {
    std::vector<ExperimentReport> reports;
    for (double lambda : g.lambdas)
      for (double snr : g.snrs) {
        KernelSpec kernel = g.family == KernelFamily::Laplace
                                ? KernelSpec::laplace(lambda)
                                : KernelSpec::gaussian(lambda);
        ExperimentConfig cfg =
            make_experiment_config(kernel, snr, g.set, 256, 60, 4, replications,
                                   split_seed(seed, cell_index++));
        reports.push_back(run_experiment(cfg));
      }
    std::ofstream out(fs::path(out_dir) / g.file);
    if (!out) throw std::runtime_error(std::string("cannot write ") + g.file);
    out << emit_csv(reports);
  }
}

void write_curve_data(const ExperimentConfig& config, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto funcs = function_set(config.set);
  if (config.K < 1 || static_cast<std::size_t>(config.K) > funcs.size())
    throw std::invalid_argument("write_curve_data: K outside the function set");
  funcs.resize(static_cast<std::size_t>(config.K));
  // one replication, laid out exactly like replication 0 of run_experiment
  const std::uint64_t rep_seed = split_seed(config.seed, 0);
  Rng assign_rng(split_seed(rep_seed, 0));
  ClusteringAssignment Z =
      make_balanced_assignment(config.M, config.K, assign_rng);
  ProblemInstance inst =
      build_instance(funcs, Z, config.kernel, config.snr, config.pipe.basis);
  Eigen::MatrixXd X = simulate(inst, split_seed(rep_seed, 1));
  std::vector<Eigen::MatrixXd> estimates;
  for (PipelineId id : config.pipelines) {
    PipelineConfig pc = config.pipe;
    switch (id) {
      case PipelineId::Before:
        pc.kmeans.seed = split_seed(rep_seed, 2);
        estimates.push_back(
            clustering_before(X, inst,
                              config.k_auto ? std::nullopt
                                            : std::optional<int>(config.K),
                              pc)
                .F_hat);
        break;
      case PipelineId::After:
        pc.kmeans.seed = split_seed(rep_seed, 3);
        estimates.push_back(clustering_after(X, inst, config.K, pc).F_hat);
        break;
      case PipelineId::None:
        estimates.push_back(no_clustering(X, inst, pc).F_hat);
        break;
    }
  }
  for (int k = 0; k < config.K; ++k) {
    int col = -1;
    for (int m = 0; m < config.M; ++m)
      if (Z.labels[static_cast<std::size_t>(m)] == k) {
        col = m;
        break;
      }
    std::string name = "curves_" + kernel_family_name(config.kernel.family) +
                       "_" + set_name(config.set) + "_k" + std::to_string(k) +
                       ".csv";
    std::ofstream out(fs::path(out_dir) / name);
    if (!out) throw std::runtime_error("cannot write " + name);
    out << "x,truth";
    for (PipelineId id : config.pipelines) out << ',' << pipeline_name(id);
    out << '\n';
    for (int i = 0; i < config.n; ++i) {
      double x = static_cast<double>(i + 1) / static_cast<double>(config.n);
      out << fmt_num(x) << ',' << fmt_num(inst.F_true(i, col));
      for (const auto& F : estimates) out << ',' << fmt_num(F(i, col));
      out << '\n';
    }
  }
}

void write_rate_sweep(const std::vector<RateParams>& grid, std::ostream& out) {
  out << "M,K,delta,r,gamma,alpha,beta,rate_clustered,rate_unclustered,ratio\n";
  for (const RateParams& p : grid) {
    const double rc = rate_clustered(p);
    const double ru = rate_unclustered(p);
    out << fmt_num(p.M) << ',' << fmt_num(p.K) << ',' << fmt_num(p.delta) << ','
        << fmt_num(p.r) << ',' << fmt_num(p.gamma) << ',' << fmt_num(p.alpha)
        << ',' << fmt_num(p.beta) << ',' << fmt_num(rc) << ',' << fmt_num(ru)
        << ',' << fmt_num(rc / ru) << '\n';
  }
}

}  // namespace declust
