#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>
#include <cmath>

#include "pogit/checking.hpp"
#include "pogit/math.hpp"
#include "pogit/mcmc.hpp"
#include "pogit/rng.hpp"
#include "pogit/simulation.hpp"
#include "test_util.hpp"

using namespace pogit;
using namespace testutil;

TEST_CASE("statistics: identical replicates and unit shift") {
  Eigen::VectorXi z(4);
  z << 3, 1, 4, 1;
  SUBCASE("replicates identical to observed") {
    CountMatrix rep(2, 4);
    for (int d = 0; d < 2; ++d)
      for (int i = 0; i < 4; ++i) rep(d, i) = z[i];
    Eigen::VectorXd mean = predictive_stat(rep, z, PredStat::kSampleMean);
    Eigen::VectorXd var = predictive_stat(rep, z, PredStat::kSampleVariance);
    Eigen::VectorXd lmse = predictive_stat(rep, z, PredStat::kLogMse);
    double z_mean = z.cast<double>().mean();
    double z_var = (z.cast<double>().array() - z_mean).square().sum() / 3.0;
    CHECK(mean[0] == doctest::Approx(z_mean));
    CHECK(var[1] == doctest::Approx(z_var));
    CHECK(lmse[0] == kLogZeroSentinel);  // zero MSE guarded
  }
  SUBCASE("replicate one above observed everywhere: mse 1, log_mse 0") {
    CountMatrix rep(1, 4);
    for (int i = 0; i < 4; ++i) rep(0, i) = z[i] + 1;
    Eigen::VectorXd lmse = predictive_stat(rep, z, PredStat::kLogMse);
    CHECK(lmse[0] == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("prior predictive: near-point-mass priors give the fixed-parameter law") {
  const int n = 60;
  Eigen::VectorXi z = Eigen::VectorXi::Zero(n);
  CountDataset data = manual_dataset(z, Eigen::MatrixXd(n, 0),
                                     Eigen::MatrixXd(n, 0),
                                     Eigen::VectorXd::Zero(n),
                                     std::vector<std::uint8_t>(n, 0));
  ModelSpec spec;
  spec.priors.alpha0_mean = std::log(12.0);
  spec.priors.alpha0_sd = 1e-9;
  spec.priors.beta0_mean = 0.0;  // pi = 0.5
  spec.priors.beta0_sd = 1e-9;

  CountMatrix rep = prior_predictive_draws(spec, data, 400, 5);
  // Every replicate is Poisson(0.5 * 12) = Poisson(6).
  double mean = 0.0;
  for (Eigen::Index d = 0; d < rep.rows(); ++d)
    for (int i = 0; i < n; ++i) mean += static_cast<double>(rep(d, i));
  mean /= static_cast<double>(rep.rows() * n);
  CHECK(std::fabs(mean - 6.0) < 0.05);
}

TEST_CASE("wider coefficient priors widen the replicate spread") {
  Rng rng(44);
  const int n = 50;
  Eigen::VectorXi z = Eigen::VectorXi::Zero(n);
  Eigen::MatrixXd X(n, 1);
  for (int i = 0; i < n; ++i) X(i, 0) = rng.uniform(-0.5, 0.5);
  CountDataset data = manual_dataset(z, X, Eigen::MatrixXd(n, 0),
                                     Eigen::VectorXd::Zero(n),
                                     std::vector<std::uint8_t>(n, 0));
  ModelSpec narrow;
  narrow.process_terms = {{"x", 1}};
  narrow.priors.alpha0_mean = 1.0;
  narrow.priors.alpha0_sd = 0.2;
  narrow.priors.beta0_mean = 1.0;
  narrow.priors.beta0_sd = 0.2;
  narrow.priors.coef_sd = 1.0;
  ModelSpec wide = narrow;
  wide.priors.coef_sd = 10.0;

  auto spread_of_mean_stat = [&](const ModelSpec& spec) {
    CountMatrix rep = prior_predictive_draws(spec, data, 600, 9);
    Eigen::VectorXd means = predictive_stat(rep, z, PredStat::kSampleMean);
    double m = means.mean();
    return (means.array() - m).square().sum() / (means.size() - 1.0);
  };
  CHECK(spread_of_mean_stat(wide) >= spread_of_mean_stat(narrow));
}

TEST_CASE("TB-scale prior predictive keeps totals plausible") {
  // The check that motivated the N(-8, 1) intercept prior: against the
  // population offsets alone, prior replicate totals above one million
  // should be rare, and the median total small relative to population.
  TbSchemaConfig tb;
  tb.seed = 7;
  SimulatedData sim = simulate_tb_schema(tb);

  ModelSpec spec;
  spec.priors.alpha0_mean = -8.0;
  spec.priors.alpha0_sd = 1.0;
  spec.priors.beta0_mean = 2.0;
  spec.priors.beta0_sd = 0.6;

  CountDataset data = build_dataset(sim.observed, spec);
  const int n_draws = 1000;
  CountMatrix rep = prior_predictive_draws(spec, data, n_draws, 11);
  double population = 0.0;
  for (int i = 0; i < data.n_obs(); ++i)
    population += std::exp(data.offset[i]);
  int below = 0;
  std::vector<double> totals(n_draws);
  for (Eigen::Index d = 0; d < rep.rows(); ++d) {
    long long total = 0;
    for (int i = 0; i < data.n_obs(); ++i) total += rep(d, i);
    totals[static_cast<std::size_t>(d)] = static_cast<double>(total);
    if (total < 1000000) ++below;
  }
  double fraction = static_cast<double>(below) / n_draws;
  CAPTURE(fraction);
  CHECK(fraction >= 0.99);
  CHECK(empirical_quantile(totals, 0.5) < 0.01 * population);
}

TEST_CASE("calibration smoke test: observed statistics inside the central 99%") {
  SimulationConfig sim;
  sim.seed = 31;
  SimulatedData lattice = simulate_dataset(sim);

  ModelSpec spec;
  spec.process_terms = {{"x", 1}};
  spec.reporting_terms = {{"w", 1}};
  spec.include_icar = true;
  spec.priors.alpha0_sd = 10.0;
  spec.priors.beta0_mean = 0.0;
  spec.priors.beta0_sd = 0.6;
  CountDataset data = build_dataset(lattice.observed, spec);

  ChainConfig chains;
  chains.n_chains = 2;
  chains.n_iterations = 3000;
  chains.n_burnin = 1500;
  chains.thin = 1;
  chains.seed = 13;
  PosteriorSamples samples = run_chains(data, spec, chains);
  CountMatrix rep = replicate_observed(samples, data, spec, 17);

  for (PredStat stat : {PredStat::kSampleMean, PredStat::kSampleVariance}) {
    Eigen::VectorXd values = predictive_stat(rep, data.z, stat);
    std::vector<double> v(values.data(), values.data() + values.size());
    double lo = empirical_quantile(v, 0.005);
    double hi = empirical_quantile(v, 0.995);
    double z_mean = data.z.cast<double>().mean();
    double observed =
        stat == PredStat::kSampleMean
            ? z_mean
            : (data.z.cast<double>().array() - z_mean).square().sum() /
                  (data.n_obs() - 1.0);
    CAPTURE(observed);
    CAPTURE(lo);
    CAPTURE(hi);
    CHECK(observed >= lo);
    CHECK(observed <= hi);
  }
}
