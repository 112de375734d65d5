#include "pogit/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <thread>

#include "pogit/digest.hpp"
#include "pogit/errors.hpp"
#include "pogit/mcmc.hpp"
#include "pogit/prediction.hpp"

namespace pogit {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  return Rng::splitmix64(seed ^ (salt * 0x9E3779B97F4A7C15ULL + 0x85EBCA77ULL));
}

std::string digest_dataset(const RawData& raw) {
  std::ostringstream ss;
  for (int i = 0; i < raw.n_obs(); ++i) ss << raw.z[i] << ',';
  for (const auto& [name, col] : raw.covariates) {
    ss << name << ':';
    for (Eigen::Index i = 0; i < col.size(); ++i) ss << col[i] << ',';
  }
  return hex64(fnv1a64(ss.str()));
}

ChainConfig cell_chain_config(const CellChainSettings& s, std::uint64_t seed) {
  ChainConfig cfg;
  cfg.n_chains = s.n_chains;
  cfg.n_iterations = s.n_iterations;
  cfg.n_burnin = s.n_burnin;
  cfg.thin = s.thin;
  cfg.adaptation_interval = s.adaptation_interval;
  cfg.seed = seed;
  cfg.n_threads = 1;  // cells are the unit of parallelism
  return cfg;
}

// The lattice experiment model: x (degree 1) + ICAR in the process;
// one reporting covariate (degree 1) + iid gamma; priors per the lattice
// study (alpha0 ~ N(0, 10^2)).
ModelSpec lattice_spec(const std::string& reporting_cov, double beta0_mean,
                       double beta0_sd, bool include_theta,
                       bool include_gamma = true) {
  ModelSpec spec;
  spec.family = Family::kPoisson;
  spec.process_terms = {{"x", 1}};
  if (!reporting_cov.empty()) spec.reporting_terms = {{reporting_cov, 1}};
  spec.include_icar = true;
  spec.include_iid_process = include_theta;
  spec.include_iid_reporting = include_gamma;
  spec.priors.alpha0_mean = 0.0;
  spec.priors.alpha0_sd = 10.0;
  spec.priors.beta0_mean = beta0_mean;
  spec.priors.beta0_sd = beta0_sd;
  spec.priors.coef_sd = 10.0;
  spec.priors.halfnormal_scale = 1.0;
  return spec;
}

struct CellFit {
  CountDataset data;
  ModelSpec spec;
  PosteriorSamples samples;
  CountMatrix y_draws;
};

CellFit fit_cell(const RawData& raw, const ModelSpec& spec,
                 const CellChainSettings& chains, std::uint64_t cell_seed) {
  CellFit fit;
  fit.spec = spec;
  fit.data = build_dataset(raw, spec);
  fit.samples = run_chains(fit.data, spec, cell_chain_config(chains, cell_seed));
  fit.y_draws = sample_true_counts(fit.samples, fit.data, spec,
                                   mix_seed(cell_seed, 0xF00D));
  return fit;
}

double coverage95_y(const CellFit& fit, const Eigen::VectorXi& y_true) {
  IntervalTable pis = predictive_intervals(fit.y_draws, 0.95);
  return coverage(pis, y_true.cast<double>());
}

double mean_posterior_log_mse(const CellFit& fit, const Eigen::VectorXi& y_true) {
  const auto& y = fit.y_draws;
  double acc = 0.0;
  for (Eigen::Index d = 0; d < y.rows(); ++d) {
    double mse = 0.0;
    for (Eigen::Index i = 0; i < y.cols(); ++i) {
      double dev = static_cast<double>(y(d, i) - y_true[i]);
      mse += dev * dev;
    }
    mse /= static_cast<double>(y.cols());
    acc += mse > 0.0 ? std::log(mse) : kLogZeroSentinel;
  }
  return acc / static_cast<double>(y.rows());
}

Eigen::VectorXd posterior_mean_log_lambda(const CellFit& fit) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(fit.data.n_obs());
  int n_draws = 0;
  for (const auto& chain : fit.samples.chains) {
    for (Eigen::Index r = 0; r < chain.rows(); ++r) {
      ParameterState state = fit.samples.layout.unpack(chain.row(r));
      acc += linear_predictor_lambda(state, fit.data, fit.spec);
      ++n_draws;
    }
  }
  return acc / static_cast<double>(n_draws);
}

Eigen::VectorXd median_y(const CountMatrix& y_draws) {
  Eigen::VectorXd out(y_draws.cols());
  std::vector<double> column(static_cast<std::size_t>(y_draws.rows()));
  for (Eigen::Index i = 0; i < y_draws.cols(); ++i) {
    for (Eigen::Index d = 0; d < y_draws.rows(); ++d)
      column[static_cast<std::size_t>(d)] = static_cast<double>(y_draws(d, i));
    out[i] = empirical_quantile(column, 0.5);
  }
  return out;
}

double rmse(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd ac = a.array() - a.mean();
  Eigen::VectorXd bc = b.array() - b.mean();
  double denom = std::sqrt(ac.squaredNorm() * bc.squaredNorm());
  return denom > 0.0 ? ac.dot(bc) / denom : 0.0;
}

// Runs `jobs` cells with at most n_threads workers; each job writes only
// its own slot so results are deterministic under any schedule.
void run_cells(int n_cells, int n_threads,
               const std::function<void(int)>& job) {
  if (n_threads <= 1 || n_cells <= 1) {
    for (int c = 0; c < n_cells; ++c) job(c);
    return;
  }
  int workers = std::min(n_threads, n_cells);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&, t]() {
      for (int c = t; c < n_cells; c += workers) job(c);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

ExperimentResult experiment_prior_sensitivity(const PriorSensitivityConfig& cfg) {
  SimulationConfig sim = cfg.sim;
  sim.proxy_rhos = {cfg.proxy_rho};
  sim.seed = cfg.seed;
  SimulatedData data = simulate_dataset(sim);

  const int n_cells = static_cast<int>(cfg.prior_means.size() * cfg.prior_sds.size());
  ExperimentResult result;
  result.table.header = {"prior_mean", "prior_sd", "coverage", "status"};
  result.table.rows.resize(n_cells);
  result.cells.resize(n_cells);
  result.dataset_digests = {digest_dataset(data.observed)};

  run_cells(n_cells, cfg.n_threads, [&](int c) {
    const auto mi = static_cast<std::size_t>(c) / cfg.prior_sds.size();
    const auto si = static_cast<std::size_t>(c) % cfg.prior_sds.size();
    double mean = cfg.prior_means[mi];
    double sd = cfg.prior_sds[si];
    std::string label = "mean=" + format_double(mean) + ",sd=" + format_double(sd);
    result.cells[c].cell = label;
    std::vector<std::string> row{format_double(mean), format_double(sd), "", "ok"};
    try {
      ModelSpec spec = lattice_spec("v1", mean, sd, false);
      CellFit fit = fit_cell(data.observed, spec, cfg.chains,
                             mix_seed(cfg.seed, static_cast<std::uint64_t>(c) + 1));
      row[2] = format_double(coverage95_y(fit, data.truth.y));
    } catch (const std::exception& e) {
      result.cells[c].ok = false;
      result.cells[c].message = e.what();
      row[3] = "error";
    }
    result.table.rows[c] = std::move(row);
  });
  return result;
}

ExperimentResult experiment_information_tradeoff(const InfoTradeoffConfig& cfg) {
  SimulationConfig sim = cfg.sim;
  sim.proxy_rhos.clear();  // fit with the exact reporting covariate
  sim.seed = cfg.seed;
  SimulatedData data = simulate_dataset(sim);

  // One permutation shared by all fractions, so complete subsets nest.
  std::vector<int> order(data.observed.n_obs());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  Rng shuffle_rng(mix_seed(cfg.seed, 0x5EED));
  for (std::size_t i = order.size(); i > 1; --i) {
    auto j = static_cast<std::size_t>(shuffle_rng.uniform() * static_cast<double>(i));
    std::swap(order[i - 1], order[j]);
  }

  const int n_cells =
      static_cast<int>(cfg.prior_sds.size() * cfg.complete_fractions.size());
  ExperimentResult result;
  result.table.header = {"prior_sd", "complete_fraction", "mean_log_mse", "status"};
  result.table.rows.resize(n_cells);
  result.cells.resize(n_cells);
  result.dataset_digests = {digest_dataset(data.observed)};

  run_cells(n_cells, cfg.n_threads, [&](int c) {
    const auto si = static_cast<std::size_t>(c) / cfg.complete_fractions.size();
    const auto fi = static_cast<std::size_t>(c) % cfg.complete_fractions.size();
    double sd = cfg.prior_sds[si];
    double fraction = cfg.complete_fractions[fi];
    result.cells[c].cell =
        "sd=" + format_double(sd) + ",fraction=" + format_double(fraction);
    std::vector<std::string> row{format_double(sd), format_double(fraction), "",
                                 "ok"};
    try {
      RawData raw = data.observed;
      int n_complete = static_cast<int>(
          std::lround(fraction * static_cast<double>(raw.n_obs())));
      for (int k = 0; k < n_complete; ++k) {
        int i = order[static_cast<std::size_t>(k)];
        raw.z[i] = data.truth.y[i];  // completely reported: z equals y
        raw.complete[i] = 1;
      }
      ModelSpec spec = lattice_spec("w", cfg.prior_mean, sd, false, false);
      CellFit fit = fit_cell(raw, spec, cfg.chains,
                             mix_seed(cfg.seed, static_cast<std::uint64_t>(c) + 101));
      row[2] = format_double(mean_posterior_log_mse(fit, data.truth.y));
    } catch (const std::exception& e) {
      result.cells[c].ok = false;
      result.cells[c].message = e.what();
      row[3] = "error";
    }
    result.table.rows[c] = std::move(row);
  });
  return result;
}

ExperimentResult experiment_covariate_strength(const CovariateStrengthConfig& cfg) {
  SimulationConfig sim = cfg.sim;
  sim.proxy_rhos = cfg.rho_ladder;
  sim.seed = cfg.seed;
  SimulatedData data = simulate_dataset(sim);

  const int n_cells = static_cast<int>(cfg.rho_ladder.size());
  ExperimentResult result;
  result.table.header = {"rho", "coverage", "mean_error_log_lambda",
                         "rmse_log_lambda", "status"};
  result.table.rows.resize(n_cells);
  result.cells.resize(n_cells);
  result.dataset_digests = {digest_dataset(data.observed)};

  run_cells(n_cells, cfg.n_threads, [&](int c) {
    double rho = cfg.rho_ladder[static_cast<std::size_t>(c)];
    result.cells[c].cell = "rho=" + format_double(rho);
    std::vector<std::string> row{format_double(rho), "", "", "", "ok"};
    try {
      std::string cov = "v" + std::to_string(c + 1);
      ModelSpec spec = lattice_spec(cov, cfg.prior_mean, cfg.prior_sd, false);
      CellFit fit = fit_cell(data.observed, spec, cfg.chains,
                             mix_seed(cfg.seed, static_cast<std::uint64_t>(c) + 201));
      row[1] = format_double(coverage95_y(fit, data.truth.y));
      Eigen::VectorXd mean_ll = posterior_mean_log_lambda(fit);
      Eigen::VectorXd err = mean_ll - data.truth.log_lambda;
      row[2] = format_double(err.mean());
      row[3] = format_double(std::sqrt(err.squaredNorm() /
                                       static_cast<double>(err.size())));
    } catch (const std::exception& e) {
      result.cells[c].ok = false;
      result.cells[c].message = e.what();
      row[4] = "error";
    }
    result.table.rows[c] = std::move(row);
  });
  return result;
}

ExperimentResult experiment_covariate_classification(
    const CovariateClassificationConfig& cfg) {
  const char* variants[] = {"correct", "swapped", "none"};
  const int n_cells = cfg.n_seeds * 3;
  ExperimentResult result;
  result.table.header = {"seed_index", "variant", "rmse_median_y",
                         "corr_median_y", "dataset_digest", "status"};
  result.table.rows.resize(n_cells);
  result.cells.resize(n_cells);
  result.dataset_digests.resize(cfg.n_seeds);

  std::vector<SimulatedData> datasets;
  datasets.reserve(cfg.n_seeds);
  for (int s = 0; s < cfg.n_seeds; ++s) {
    SimulationConfig sim = cfg.sim;
    sim.proxy_rhos.clear();  // the true covariates are observed here
    sim.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(s) + 301);
    datasets.push_back(simulate_dataset(sim));
    result.dataset_digests[s] = digest_dataset(datasets.back().observed);
  }

  run_cells(n_cells, cfg.n_threads, [&](int c) {
    int s = c / 3;
    int v = c % 3;
    const SimulatedData& data = datasets[static_cast<std::size_t>(s)];
    result.cells[c].cell =
        std::string(variants[v]) + ",seed=" + std::to_string(s);
    std::vector<std::string> row{std::to_string(s), variants[v], "", "",
                                 result.dataset_digests[s], "ok"};
    try {
      ModelSpec spec = lattice_spec("", cfg.prior_mean, cfg.prior_sd, true);
      if (v == 0) {
        spec.process_terms = {{"x", 1}};
        spec.reporting_terms = {{"w", 1}};
      } else if (v == 1) {
        spec.process_terms = {{"w", 1}};
        spec.reporting_terms = {{"x", 1}};
      } else {
        spec.process_terms.clear();
        spec.reporting_terms.clear();
      }
      CellFit fit = fit_cell(data.observed, spec, cfg.chains,
                             mix_seed(cfg.seed, static_cast<std::uint64_t>(c) + 401));
      Eigen::VectorXd med = median_y(fit.y_draws);
      Eigen::VectorXd y_true = data.truth.y.cast<double>();
      row[2] = format_double(rmse(med, y_true));
      row[3] = format_double(pearson(med, y_true));
    } catch (const std::exception& e) {
      result.cells[c].ok = false;
      result.cells[c].message = e.what();
      row[5] = "error";
    }
    result.table.rows[c] = std::move(row);
  });
  return result;
}

}  // namespace pogit
