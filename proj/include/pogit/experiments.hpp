#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pogit/csv.hpp"
#include "pogit/simulation.hpp"

namespace pogit {

// Chain settings for one experiment cell (desk-scale defaults).
struct CellChainSettings {
  int n_chains = 2;
  int n_iterations = 8000;
  int n_burnin = 4000;
  int thin = 2;
  int adaptation_interval = 100;
};

struct CellStatus {
  std::string cell;
  bool ok = true;
  std::string message;
};

struct ExperimentResult {
  CsvTable table;
  std::vector<CellStatus> cells;
  std::vector<std::string> dataset_digests;  // one per simulated dataset
};

// Coverage of 95% prediction intervals for the true counts over a grid of
// Normal priors for beta0, fitting with a proxy reporting covariate.
struct PriorSensitivityConfig {
  SimulationConfig sim;
  double proxy_rho = 0.6;
  std::vector<double> prior_means{-2.0, -1.0, 0.0, 1.0, 2.0};
  std::vector<double> prior_sds{0.1, 0.25, 0.5, 1.0, 2.0};
  CellChainSettings chains;
  std::uint64_t seed = 1;
  int n_threads = 1;
};
ExperimentResult experiment_prior_sensitivity(const PriorSensitivityConfig& cfg);

// Mean posterior log-MSE of the true counts over a grid of (prior sd,
// fraction of observations marked completely reported). Complete subsets
// are nested across fractions. Fits use the exact reporting covariate so
// the information sources under study (prior strength, complete counts)
// are not confounded with proxy error.
struct InfoTradeoffConfig {
  SimulationConfig sim;
  double prior_mean = 0.0;
  std::vector<double> prior_sds{0.25, 1.0, 10.0};
  std::vector<double> complete_fractions{0.0, 0.3, 0.6};
  CellChainSettings chains;
  std::uint64_t seed = 1;
  int n_threads = 1;
};
ExperimentResult experiment_information_tradeoff(const InfoTradeoffConfig& cfg);

// Coverage, mean error and RMSE of log lambda when the reporting covariate
// is replaced by proxies of decreasing correlation with the truth.
struct CovariateStrengthConfig {
  SimulationConfig sim;  // reporting_noise_sd defaults to 0.5 here
  std::vector<double> rho_ladder{0.9, 0.75, 0.6, 0.45, 0.3};
  double prior_mean = 0.6;
  double prior_sd = 0.6;
  CellChainSettings chains;
  std::uint64_t seed = 1;
  int n_threads = 1;

  CovariateStrengthConfig() { sim.reporting_noise_sd = 0.5; }
};
ExperimentResult experiment_covariate_strength(const CovariateStrengthConfig& cfg);

// Three fits per seed on one dataset (covariates classified correctly,
// swapped, or dropped), scored by RMSE of the median predicted true count.
struct CovariateClassificationConfig {
  SimulationConfig sim;  // process_noise_sd defaults to 0.3 here
  double prior_mean = 0.0;
  double prior_sd = 0.6;
  int n_seeds = 5;
  CellChainSettings chains;
  std::uint64_t seed = 1;
  int n_threads = 1;

  CovariateClassificationConfig() { sim.process_noise_sd = 0.3; }
};
ExperimentResult experiment_covariate_classification(
    const CovariateClassificationConfig& cfg);

}  // namespace pogit
