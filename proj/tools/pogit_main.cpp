// pogit: fit, check and experiment with the hierarchical Binomial-thinned
// Poisson model for under-reported count data.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pogit/checking.hpp"
#include "pogit/csv.hpp"
#include "pogit/diagnostics.hpp"
#include "pogit/digest.hpp"
#include "pogit/elicitation.hpp"
#include "pogit/errors.hpp"
#include "pogit/experiments.hpp"
#include "pogit/ingest.hpp"
#include "pogit/manifest.hpp"
#include "pogit/mcmc.hpp"
#include "pogit/prediction.hpp"
#include "pogit/simulation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pogit;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
}

std::string resolve_out_dir(const CommonArgs& args, const std::string& command) {
  if (!args.out_dir.empty()) return args.out_dir;
  if (const char* env = std::getenv("POGIT_OUT_DIR")) return env;
  return command + "_out";
}

int resolve_threads(const CommonArgs& args) {
  if (args.threads) return *args.threads;
  if (const char* env = std::getenv("POGIT_THREADS")) return std::atoi(env);
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// --- config field helpers with field-level messages ---------------------

template <typename T>
T get_field(const json& j, const std::string& key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config field '" + key + "' has the wrong type");
  }
}

template <typename T>
T need_field(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("config field '" + key + "' is required");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config field '" + key + "' has the wrong type");
  }
}

ColumnMapping parse_columns(const json& j) {
  ColumnMapping m;
  m.region = get_field<std::string>(j, "region", m.region);
  m.count = get_field<std::string>(j, "count", m.count);
  m.time = get_field<std::string>(j, "time", "");
  m.group = get_field<std::string>(j, "group", "");
  m.population = get_field<std::string>(j, "population", "");
  m.complete = get_field<std::string>(j, "complete", "");
  m.covariates = get_field<std::vector<std::string>>(j, "covariates", {});
  return m;
}

ModelSpec parse_model(const json& j) {
  ModelSpec spec;
  std::string family = get_field<std::string>(j, "family", "poisson");
  if (family == "poisson") {
    spec.family = Family::kPoisson;
  } else if (family == "negbin" || family == "negative_binomial") {
    spec.family = Family::kNegBinomial;
  } else {
    throw ConfigError("config field 'family' must be poisson or negbin");
  }
  auto parse_terms = [](const json& arr) {
    std::vector<Term> terms;
    for (const auto& t : arr) {
      terms.push_back({need_field<std::string>(t, "name"),
                       get_field<int>(t, "degree", 1)});
    }
    return terms;
  };
  if (j.contains("process_terms")) spec.process_terms = parse_terms(j.at("process_terms"));
  if (j.contains("reporting_terms"))
    spec.reporting_terms = parse_terms(j.at("reporting_terms"));
  spec.include_icar = get_field<bool>(j, "icar", false);
  spec.include_iid_process = get_field<bool>(j, "iid_process", false);
  spec.include_iid_reporting = get_field<bool>(j, "iid_reporting", false);
  if (j.contains("priors")) {
    const json& p = j.at("priors");
    spec.priors.alpha0_mean = get_field<double>(p, "alpha0_mean", spec.priors.alpha0_mean);
    spec.priors.alpha0_sd = get_field<double>(p, "alpha0_sd", spec.priors.alpha0_sd);
    spec.priors.beta0_mean = get_field<double>(p, "beta0_mean", spec.priors.beta0_mean);
    spec.priors.beta0_sd = get_field<double>(p, "beta0_sd", spec.priors.beta0_sd);
    spec.priors.coef_sd = get_field<double>(p, "coef_sd", spec.priors.coef_sd);
    spec.priors.halfnormal_scale =
        get_field<double>(p, "halfnormal_scale", spec.priors.halfnormal_scale);
    spec.priors.dispersion_scale =
        get_field<double>(p, "dispersion_scale", spec.priors.dispersion_scale);
  }
  spec.validate();
  return spec;
}

ChainConfig parse_chains(const json& j) {
  ChainConfig cfg;
  cfg.n_chains = get_field<int>(j, "n_chains", cfg.n_chains);
  cfg.n_iterations = get_field<int>(j, "n_iterations", cfg.n_iterations);
  cfg.n_burnin = get_field<int>(j, "n_burnin", cfg.n_burnin);
  cfg.thin = get_field<int>(j, "thin", cfg.thin);
  cfg.adaptation_interval =
      get_field<int>(j, "adaptation_interval", cfg.adaptation_interval);
  cfg.seed = get_field<std::uint64_t>(j, "seed", cfg.seed);
  cfg.validate();
  return cfg;
}

CellChainSettings parse_cell_chains(const json& j) {
  CellChainSettings s;
  s.n_chains = get_field<int>(j, "n_chains", s.n_chains);
  s.n_iterations = get_field<int>(j, "n_iterations", s.n_iterations);
  s.n_burnin = get_field<int>(j, "n_burnin", s.n_burnin);
  s.thin = get_field<int>(j, "thin", s.thin);
  s.adaptation_interval =
      get_field<int>(j, "adaptation_interval", s.adaptation_interval);
  return s;
}

SimulationConfig parse_sim(const json& j) {
  SimulationConfig sim;
  sim.n_regions = get_field<int>(j, "n_regions", sim.n_regions);
  if (j.contains("truth")) {
    const json& t = j.at("truth");
    sim.alpha0 = get_field<double>(t, "alpha0", sim.alpha0);
    sim.alpha1 = get_field<double>(t, "alpha1", sim.alpha1);
    sim.beta0 = get_field<double>(t, "beta0", sim.beta0);
    sim.beta1 = get_field<double>(t, "beta1", sim.beta1);
    sim.nu = get_field<double>(t, "nu", sim.nu);
  }
  sim.reporting_noise_sd =
      get_field<double>(j, "reporting_noise_sd", sim.reporting_noise_sd);
  sim.process_noise_sd =
      get_field<double>(j, "process_noise_sd", sim.process_noise_sd);
  sim.proxy_rhos = get_field<std::vector<double>>(j, "proxy_rhos", {});
  sim.seed = get_field<std::uint64_t>(j, "seed", sim.seed);
  return sim;
}

struct LoadedDataset {
  RawData raw;
  std::string data_path, adjacency_path;
  std::vector<std::string> warnings;
};

LoadedDataset load_dataset(const json& cfg) {
  const json& d = cfg.at("data");
  LoadedDataset out;
  out.data_path = need_field<std::string>(d, "path");
  out.adjacency_path = need_field<std::string>(d, "adjacency");
  ColumnMapping mapping =
      d.contains("columns") ? parse_columns(d.at("columns")) : ColumnMapping{};
  IngestReport report;
  out.raw = ingest_dataset(out.data_path, out.adjacency_path, mapping, &report);
  out.warnings = report.warnings;
  return out;
}

void write_table(const std::string& path, const CsvTable& table,
                 RunManifest& manifest) {
  write_csv(path, table);
  manifest.outputs.push_back(path);
}

std::string quantile_label(const std::string& prefix, double level) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", 100.0 * level);
  return prefix + buf;
}

// --- commands ------------------------------------------------------------

// Runs the command body; the manifest lands in out_dir whether the body
// succeeds or throws (failures are recorded in the warnings list).
int with_manifest(RunManifest& manifest, const std::string& out_dir,
                  std::chrono::steady_clock::time_point t0,
                  const std::function<void()>& body) {
  auto stamp = [&]() {
    manifest.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
  };
  try {
    body();
  } catch (const std::exception& e) {
    manifest.warnings.push_back(std::string("error: ") + e.what());
    stamp();
    try {
      manifest.write(out_dir);
    } catch (...) {
    }
    throw;
  }
  stamp();
  manifest.write(out_dir);
  return 0;
}


int cmd_simulate(const CommonArgs& args) {
  json cfg = load_config(args.config_path);
  std::string out_dir = resolve_out_dir(args, "simulate");
  fs::create_directories(out_dir);

  RunManifest manifest;
  manifest.command = "simulate";
  manifest.config = cfg;
  manifest.input_digests[args.config_path] = file_digest(args.config_path);
  auto t0 = std::chrono::steady_clock::now();
  return with_manifest(manifest, out_dir, t0, [&]() {

    std::string schema = get_field<std::string>(cfg, "schema", "lattice");
    SimulatedData sim;
    std::uint64_t seed;
    if (schema == "lattice") {
      SimulationConfig sc = parse_sim(cfg);
      if (args.seed) sc.seed = *args.seed;
      seed = sc.seed;
      sim = simulate_dataset(sc);
    } else if (schema == "tb") {
      TbSchemaConfig tc;
      tc.n_regions = get_field<int>(cfg, "n_regions", tc.n_regions);
      tc.years = get_field<std::vector<int>>(cfg, "years", tc.years);
      tc.seed = get_field<std::uint64_t>(cfg, "seed", tc.seed);
      if (args.seed) tc.seed = *args.seed;
      seed = tc.seed;
      sim = simulate_tb_schema(tc);
    } else {
      throw ConfigError("config field 'schema' must be lattice or tb");
    }
    manifest.seed = seed;

    ColumnMapping mapping;
    mapping.region = "region";
    mapping.count = "z";
    if (schema == "tb") {
      mapping.time = "year";
      mapping.population = "population";
    }
    std::string data_path = out_dir + "/data.csv";
    std::string adj_path = out_dir + "/adjacency.txt";
    export_dataset(sim.observed, mapping, data_path, adj_path);
    manifest.outputs.push_back(data_path);
    manifest.outputs.push_back(adj_path);

    CsvTable truth;
    truth.header = {"obs", "region", "y", "pi", "log_lambda", "phi", "w"};
    for (int i = 0; i < sim.observed.n_obs(); ++i) {
      int s = sim.observed.units.region[i];
      truth.rows.push_back({std::to_string(i), std::to_string(s),
                            std::to_string(sim.truth.y[i]),
                            format_double(sim.truth.pi[i]),
                            format_double(sim.truth.log_lambda[i]),
                            format_double(sim.truth.phi[s]),
                            format_double(sim.truth.w[s])});
    }
    write_table(out_dir + "/truth.csv", truth, manifest);

  });
}

int cmd_fit(const CommonArgs& args) {
  json cfg = load_config(args.config_path);
  std::string out_dir = resolve_out_dir(args, "fit");
  fs::create_directories(out_dir);

  RunManifest manifest;
  manifest.command = "fit";
  manifest.config = cfg;
  manifest.input_digests[args.config_path] = file_digest(args.config_path);
  auto t0 = std::chrono::steady_clock::now();
  return with_manifest(manifest, out_dir, t0, [&]() {

    LoadedDataset loaded = load_dataset(cfg);
    manifest.input_digests[loaded.data_path] = file_digest(loaded.data_path);
    manifest.input_digests[loaded.adjacency_path] = file_digest(loaded.adjacency_path);
    manifest.warnings = loaded.warnings;

    ModelSpec spec = parse_model(cfg.at("model"));
    ChainConfig chains = parse_chains(cfg.contains("chains") ? cfg.at("chains") : json::object());
    if (args.seed) chains.seed = *args.seed;
    chains.n_threads = resolve_threads(args);
    manifest.seed = chains.seed;

    CountDataset data = build_dataset(loaded.raw, spec);
    PosteriorSamples samples = run_chains(data, spec, chains);
    save_samples(samples, out_dir);
    for (int c = 0; c < samples.n_chains(); ++c)
      manifest.outputs.push_back(out_dir + "/chain_" + std::to_string(c) + ".csv");
    manifest.outputs.push_back(out_dir + "/samples_meta.json");

    CsvTable diag;
    diag.header = {"parameter", "mean", "sd", "psrf", "ess"};
    for (std::size_t p = 0; p < samples.names.size(); ++p) {
      auto cols = samples.parameter(static_cast<int>(p));
      double total = 0.0;
      long long count = 0;
      for (const auto& v : cols) {
        total += v.sum();
        count += v.size();
      }
      double mean = total / static_cast<double>(count);
      double ss = 0.0;
      for (const auto& v : cols) ss += (v.array() - mean).square().sum();
      double sd = std::sqrt(ss / static_cast<double>(count - 1));
      double r = samples.n_chains() >= 2 ? psrf(cols)
                                         : std::numeric_limits<double>::quiet_NaN();
      double ess = effective_sample_size(cols);
      diag.rows.push_back({samples.names[p], format_double(mean), format_double(sd),
                           format_double(r), format_double(ess)});
    }
    write_table(out_dir + "/diagnostics.csv", diag, manifest);

  });
}

int cmd_predict(const CommonArgs& args) {
  json cfg = load_config(args.config_path);
  std::string out_dir = resolve_out_dir(args, "predict");
  fs::create_directories(out_dir);

  RunManifest manifest;
  manifest.command = "predict";
  manifest.config = cfg;
  manifest.input_digests[args.config_path] = file_digest(args.config_path);
  auto t0 = std::chrono::steady_clock::now();
  return with_manifest(manifest, out_dir, t0, [&]() {

    LoadedDataset loaded = load_dataset(cfg);
    ModelSpec spec = parse_model(cfg.at("model"));
    CountDataset data = build_dataset(loaded.raw, spec);

    std::string fit_dir = need_field<std::string>(cfg, "fit_dir");
    PosteriorSamples samples = load_samples(fit_dir);
    if (samples.spec_hash != spec_fingerprint(spec, data)) {
      throw ConfigError("predict: model/data do not match the fit in " + fit_dir +
                        " (spec fingerprint mismatch)");
    }
    std::uint64_t seed = get_field<std::uint64_t>(cfg, "seed", 1);
    if (args.seed) seed = *args.seed;
    manifest.seed = seed;

    std::vector<double> y_levels =
        get_field<std::vector<double>>(cfg, "y_levels", {0.025, 0.5, 0.975});
    std::vector<double> total_levels =
        get_field<std::vector<double>>(cfg, "total_levels", {0.05, 0.5, 0.95});

    CountMatrix y = sample_true_counts(samples, data, spec, seed);
    CountMatrix rep = replicate_observed(samples, data, spec,
                                         Rng::splitmix64(seed ^ 0x9E37ULL));
    RateSummary rates = reporting_rate_summary(samples, data, spec);

    CsvTable pred;
    pred.header = {"obs", "region", "time", "group", "z"};
    for (double level : y_levels)
      pred.header.push_back(quantile_label("y_q", level));
    pred.header.insert(pred.header.end(), {"pi_mean", "pi_lower", "pi_upper"});
    std::vector<double> column(static_cast<std::size_t>(y.rows()));
    std::vector<long long> ids = loaded.raw.region_ids;
    for (int i = 0; i < data.n_obs(); ++i) {
      std::vector<std::string> row;
      row.push_back(std::to_string(i));
      row.push_back(std::to_string(ids[data.units.region[i]]));
      row.push_back(std::to_string(data.units.time[i]));
      row.push_back(std::to_string(data.units.group[i]));
      row.push_back(std::to_string(data.z[i]));
      for (Eigen::Index d = 0; d < y.rows(); ++d)
        column[static_cast<std::size_t>(d)] = static_cast<double>(y(d, i));
      for (double level : y_levels)
        row.push_back(format_double(empirical_quantile(column, level)));
      row.push_back(format_double(rates.mean[i]));
      row.push_back(format_double(rates.lower[i]));
      row.push_back(format_double(rates.upper[i]));
      pred.rows.push_back(std::move(row));
    }
    write_table(out_dir + "/predictions.csv", pred, manifest);

    std::string group_by = get_field<std::string>(cfg, "group_by", "time");
    const std::vector<int>& labels =
        group_by == "group" ? data.units.group : data.units.time;
    GroupTotals totals = total_unreported_quantiles(y, data, labels, total_levels);
    CsvTable tot;
    tot.header = {group_by, "observed_total"};
    for (double level : total_levels)
      tot.header.push_back(quantile_label("unreported_q", level));
    for (std::size_t g = 0; g < totals.labels.size(); ++g) {
      std::vector<std::string> row{std::to_string(totals.labels[g]),
                                   std::to_string(totals.observed[g])};
      for (Eigen::Index q = 0; q < totals.quantiles.cols(); ++q)
        row.push_back(format_double(totals.quantiles(static_cast<Eigen::Index>(g), q)));
      tot.rows.push_back(std::move(row));
    }
    write_table(out_dir + "/totals.csv", tot, manifest);

    IntervalTable rep_int = predictive_intervals(rep, 0.95);
    CsvTable reps;
    reps.header = {"obs", "z", "replicate_lower", "replicate_upper", "inside"};
    int inside_count = 0;
    for (int i = 0; i < data.n_obs(); ++i) {
      bool inside = data.z[i] >= rep_int.lower[i] && data.z[i] <= rep_int.upper[i];
      inside_count += inside;
      reps.rows.push_back({std::to_string(i), std::to_string(data.z[i]),
                           format_double(rep_int.lower[i]),
                           format_double(rep_int.upper[i]),
                           inside ? "1" : "0"});
    }
    write_table(out_dir + "/replicates.csv", reps, manifest);

    int n_points = get_field<int>(cfg, "effect_curve_points", 50);
    auto write_curves = [&](const std::vector<FittedTerm>& terms, Side side,
                            const std::string& prefix) {
      for (const auto& term : terms) {
        Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(
            n_points, term.basis.train_min(), term.basis.train_max());
        EffectCurve curve = effect_curve(samples, term, side, grid);
        CsvTable t;
        t.header = {"x", "mean", "lower", "upper", "extrapolated"};
        for (Eigen::Index g = 0; g < grid.size(); ++g) {
          t.rows.push_back({format_double(curve.grid[g]), format_double(curve.mean[g]),
                            format_double(curve.lower[g]),
                            format_double(curve.upper[g]),
                            curve.extrapolated[static_cast<std::size_t>(g)] ? "1" : "0"});
        }
        write_table(out_dir + "/" + prefix + "_" + term.name + ".csv", t, manifest);
      }
    };
    write_curves(data.process_design, Side::kProcess, "effect_process");
    write_curves(data.reporting_design, Side::kReporting, "effect_reporting");

    std::cout << "replicate 95% interval coverage: "
              << static_cast<double>(inside_count) / data.n_obs() << "\n";

  });
}

int cmd_check(const CommonArgs& args) {
  json cfg = load_config(args.config_path);
  std::string out_dir = resolve_out_dir(args, "check");
  fs::create_directories(out_dir);

  RunManifest manifest;
  manifest.command = "check";
  manifest.config = cfg;
  manifest.input_digests[args.config_path] = file_digest(args.config_path);
  auto t0 = std::chrono::steady_clock::now();
  return with_manifest(manifest, out_dir, t0, [&]() {

    LoadedDataset loaded = load_dataset(cfg);
    ModelSpec spec = parse_model(cfg.at("model"));
    CountDataset data = build_dataset(loaded.raw, spec);
    std::string fit_dir = need_field<std::string>(cfg, "fit_dir");
    PosteriorSamples samples = load_samples(fit_dir);
    if (samples.spec_hash != spec_fingerprint(spec, data)) {
      throw ConfigError("check: model/data do not match the fit in " + fit_dir);
    }
    std::uint64_t seed = get_field<std::uint64_t>(cfg, "seed", 1);
    if (args.seed) seed = *args.seed;
    manifest.seed = seed;
    int n_prior = get_field<int>(cfg, "n_prior_draws", 1000);

    CountMatrix post_rep = replicate_observed(samples, data, spec, seed);
    CountMatrix prior_rep =
        prior_predictive_draws(spec, data, n_prior, Rng::splitmix64(seed ^ 0xC43ULL));

    auto stats_table = [&](const CountMatrix& reps) {
      CsvTable t;
      t.header = {"draw", "sample_mean", "sample_variance", "log_mse"};
      Eigen::VectorXd mean = predictive_stat(reps, data.z, PredStat::kSampleMean);
      Eigen::VectorXd var = predictive_stat(reps, data.z, PredStat::kSampleVariance);
      Eigen::VectorXd lmse = predictive_stat(reps, data.z, PredStat::kLogMse);
      for (Eigen::Index d = 0; d < reps.rows(); ++d) {
        t.rows.push_back({std::to_string(d), format_double(mean[d]),
                          format_double(var[d]), format_double(lmse[d])});
      }
      return t;
    };
    write_table(out_dir + "/check_posterior.csv", stats_table(post_rep), manifest);
    write_table(out_dir + "/check_prior.csv", stats_table(prior_rep), manifest);

    double z_mean = data.z.cast<double>().mean();
    double z_var =
        (data.z.cast<double>().array() - z_mean).square().sum() /
        static_cast<double>(data.n_obs() - 1);
    CsvTable obs;
    obs.header = {"statistic", "value"};
    obs.rows.push_back({"sample_mean", format_double(z_mean)});
    obs.rows.push_back({"sample_variance", format_double(z_var)});
    write_table(out_dir + "/observed_stats.csv", obs, manifest);

  });
}

int cmd_elicit(const CommonArgs& args) {
  json cfg = load_config(args.config_path);
  std::string out_dir = resolve_out_dir(args, "elicit");
  fs::create_directories(out_dir);

  RunManifest manifest;
  manifest.command = "elicit";
  manifest.config = cfg;
  manifest.input_digests[args.config_path] = file_digest(args.config_path);
  auto t0 = std::chrono::steady_clock::now();
  return with_manifest(manifest, out_dir, t0, [&]() {

    std::vector<RateEstimate> estimates;
    if (cfg.contains("estimates_file")) {
      std::string path = need_field<std::string>(cfg, "estimates_file");
      manifest.input_digests[path] = file_digest(path);
      CsvTable t = read_csv(path);
      int pc = t.col("point"), lc = t.col("ci_low"), hc = t.col("ci_high");
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
        int line = static_cast<int>(r) + 2;
        estimates.push_back(
            {parse_double(t.rows[r][static_cast<std::size_t>(pc)], path, line),
             parse_double(t.rows[r][static_cast<std::size_t>(lc)], path, line),
             parse_double(t.rows[r][static_cast<std::size_t>(hc)], path, line)});
      }
    } else if (cfg.contains("estimates")) {
      for (const auto& e : cfg.at("estimates")) {
        estimates.push_back({need_field<double>(e, "point"),
                             need_field<double>(e, "ci_low"),
                             need_field<double>(e, "ci_high")});
      }
    } else {
      throw ConfigError("config: need 'estimates' or 'estimates_file'");
    }

    int n_sims = get_field<int>(cfg, "n_sims", 100000);
    bool prob_scale = get_field<bool>(cfg, "probability_scale", false);
    std::uint64_t seed = get_field<std::uint64_t>(cfg, "seed", 1);
    if (args.seed) seed = *args.seed;
    manifest.seed = seed;

    json out;
    json yearly = json::array();
    std::vector<LogitNormal> fitted;
    for (const auto& e : estimates) {
      LogitNormal f = approximate_rate_distribution(e.point, e.ci_low, e.ci_high);
      fitted.push_back(f);
      yearly.push_back({{"point", e.point},
                        {"ci_low", e.ci_low},
                        {"ci_high", e.ci_high},
                        {"logit_mean", f.mean},
                        {"logit_sd", f.sd}});
    }
    LogitNormal prior = elicit_beta0_prior(fitted, n_sims, seed, prob_scale);
    out["yearly"] = yearly;
    out["prior_mean"] = prior.mean;
    out["prior_sd"] = prior.sd;
    out["n_sims"] = n_sims;
    out["probability_scale"] = prob_scale;

    std::string path = out_dir + "/prior.json";
    std::ofstream of(path);
    if (!of) throw DataError("cannot write " + path);
    of << out.dump(2) << "\n";
    manifest.outputs.push_back(path);
    std::cout << "beta0 prior: N(" << prior.mean << ", " << prior.sd << "^2)\n";

  });
}

int cmd_experiment(const CommonArgs& args, const std::string& protocol) {
  json cfg = load_config(args.config_path);
  std::string out_dir = resolve_out_dir(args, "experiment");
  fs::create_directories(out_dir);

  RunManifest manifest;
  manifest.command = "experiment " + protocol;
  manifest.config = cfg;
  manifest.input_digests[args.config_path] = file_digest(args.config_path);
  auto t0 = std::chrono::steady_clock::now();
  return with_manifest(manifest, out_dir, t0, [&]() {

    std::uint64_t seed = get_field<std::uint64_t>(cfg, "seed", 1);
    if (args.seed) seed = *args.seed;
    manifest.seed = seed;
    int threads = resolve_threads(args);
    CellChainSettings chains = cfg.contains("chains")
                                   ? parse_cell_chains(cfg.at("chains"))
                                   : CellChainSettings{};
    SimulationConfig sim =
        cfg.contains("sim") ? parse_sim(cfg.at("sim")) : SimulationConfig{};

    ExperimentResult result;
    if (protocol == "prior-sensitivity") {
      PriorSensitivityConfig pc;
      pc.sim = sim;
      pc.proxy_rho = get_field<double>(cfg, "proxy_rho", pc.proxy_rho);
      pc.prior_means = get_field<std::vector<double>>(cfg, "prior_means", pc.prior_means);
      pc.prior_sds = get_field<std::vector<double>>(cfg, "prior_sds", pc.prior_sds);
      pc.chains = chains;
      pc.seed = seed;
      pc.n_threads = threads;
      result = experiment_prior_sensitivity(pc);
    } else if (protocol == "information-tradeoff") {
      InfoTradeoffConfig ic;
      ic.sim = sim;
      ic.prior_mean = get_field<double>(cfg, "prior_mean", ic.prior_mean);
      ic.prior_sds = get_field<std::vector<double>>(cfg, "prior_sds", ic.prior_sds);
      ic.complete_fractions = get_field<std::vector<double>>(cfg, "complete_fractions",
                                                             ic.complete_fractions);
      ic.chains = chains;
      ic.seed = seed;
      ic.n_threads = threads;
      result = experiment_information_tradeoff(ic);
    } else if (protocol == "covariate-strength") {
      CovariateStrengthConfig cc;
      cc.sim = sim;
      if (!cfg.contains("sim") || !cfg.at("sim").contains("reporting_noise_sd"))
        cc.sim.reporting_noise_sd = 0.5;
      cc.rho_ladder = get_field<std::vector<double>>(cfg, "rho_ladder", cc.rho_ladder);
      cc.prior_mean = get_field<double>(cfg, "prior_mean", cc.prior_mean);
      cc.prior_sd = get_field<double>(cfg, "prior_sd", cc.prior_sd);
      cc.chains = chains;
      cc.seed = seed;
      cc.n_threads = threads;
      result = experiment_covariate_strength(cc);
    } else if (protocol == "covariate-classification") {
      CovariateClassificationConfig cc;
      cc.sim = sim;
      if (!cfg.contains("sim") || !cfg.at("sim").contains("process_noise_sd"))
        cc.sim.process_noise_sd = 0.3;
      cc.prior_mean = get_field<double>(cfg, "prior_mean", cc.prior_mean);
      cc.prior_sd = get_field<double>(cfg, "prior_sd", cc.prior_sd);
      cc.n_seeds = get_field<int>(cfg, "n_seeds", cc.n_seeds);
      cc.chains = chains;
      cc.seed = seed;
      cc.n_threads = threads;
      result = experiment_covariate_classification(cc);
    } else {
      throw ConfigError("unknown experiment protocol: " + protocol);
    }

    write_table(out_dir + "/results.csv", result.table, manifest);
    json cells = json::array();
    bool any_failed = false;
    for (const auto& c : result.cells) {
      cells.push_back({{"cell", c.cell}, {"ok", c.ok}, {"message", c.message}});
      if (!c.ok) any_failed = true;
    }
    manifest.config["cells"] = cells;
    manifest.config["dataset_digests"] = result.dataset_digests;
    if (any_failed) manifest.warnings.push_back("one or more cells failed");

  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical under-reported count model (Pogit): simulate, "
               "fit, predict, check, experiment, elicit"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string protocol;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "JSON config file")->required();
    sub->add_option("--out-dir", args.out_dir, "output directory");
    sub->add_option("--seed", [&args](const std::vector<std::string>& vals) {
      args.seed = std::stoull(vals.front());
      return true;
    }, "seed override");
    sub->add_option("--threads", [&args](const std::vector<std::string>& vals) {
      args.threads = std::stoi(vals.front());
      return true;
    }, "parallelism cap");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "generate synthetic data");
  CLI::App* fit = app.add_subcommand("fit", "run the MCMC sampler");
  CLI::App* predict = app.add_subcommand("predict", "corrected-count predictions");
  CLI::App* check = app.add_subcommand("check", "predictive checking statistics");
  CLI::App* experiment = app.add_subcommand("experiment", "simulation experiments");
  CLI::App* elicit = app.add_subcommand("elicit", "beta0 prior elicitation");
  for (CLI::App* sub : {simulate, fit, predict, check, experiment, elicit})
    add_common(sub);
  experiment->add_option("protocol", protocol,
                         "prior-sensitivity | information-tradeoff | "
                         "covariate-strength | covariate-classification")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(args);
    if (fit->parsed()) return cmd_fit(args);
    if (predict->parsed()) return cmd_predict(args);
    if (check->parsed()) return cmd_check(args);
    if (experiment->parsed()) return cmd_experiment(args, protocol);
    if (elicit->parsed()) return cmd_elicit(args);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
