#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "pogit/data.hpp"
#include "pogit/mcmc.hpp"
#include "pogit/model.hpp"

namespace pogit {

using CountMatrix =
    Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;  // draws x obs

// True-count draws y per posterior draw: y = z + Poisson((1-pi) lambda)
// for the Poisson family; for NegBin the latent relative risk is drawn
// from its Gamma(disp + z, disp + pi lambda) conditional first. Rows follow
// the pooled chain order; draw d uses the RNG stream (seed, d), so results
// are deterministic and independent of any parallel schedule.
CountMatrix sample_true_counts(const PosteriorSamples& samples,
                               const CountDataset& data, const ModelSpec& spec,
                               std::uint64_t seed);

// Posterior predictive replicates of the observed counts, z~ drawn fresh
// from the marginal observation model per posterior draw.
CountMatrix replicate_observed(const PosteriorSamples& samples,
                               const CountDataset& data, const ModelSpec& spec,
                               std::uint64_t seed);

// Empirical quantile: the ceil(p*n)-th order statistic. Integer-valued
// inputs give integer-valued quantiles.
double empirical_quantile(std::vector<double> values, double p);

struct IntervalTable {
  Eigen::VectorXd lower, upper;
};

// Equal-tailed empirical intervals per observation (columns of `draws`).
// Throws ConfigError for level outside (0,1) or fewer than 100 draws.
IntervalTable predictive_intervals(const CountMatrix& draws, double level);

// Fraction of truths inside the closed intervals.
double coverage(const IntervalTable& intervals, const Eigen::VectorXd& truth);

enum class Side { kProcess, kReporting };

struct EffectCurve {
  Eigen::VectorXd grid;
  Eigen::VectorXd mean, lower, upper;
  std::vector<std::uint8_t> extrapolated;  // outside the guard around training range
};

// Posterior mean and equal-tailed credible band of the fitted polynomial
// effect f(x) on a covariate grid.
EffectCurve effect_curve(const PosteriorSamples& samples,
                         const FittedTerm& term, Side side,
                         const Eigen::VectorXd& grid, double level = 0.95,
                         double guard_fraction = 0.05);

// Per-observation posterior summaries of the reporting rate pi.
struct RateSummary {
  Eigen::VectorXd mean, lower, upper;
};
RateSummary reporting_rate_summary(const PosteriorSamples& samples,
                                   const CountDataset& data,
                                   const ModelSpec& spec, double level = 0.95);

// Quantiles of per-group totals of unreported counts sum(y - z), computed
// from the summed draws (not from summed per-observation quantiles).
struct GroupTotals {
  std::vector<int> labels;
  std::vector<long long> observed;  // total z per group
  Eigen::MatrixXd quantiles;        // n_groups x n_levels
};
GroupTotals total_unreported_quantiles(const CountMatrix& y,
                                       const CountDataset& data,
                                       const std::vector<int>& labels,
                                       const std::vector<double>& levels);

}  // namespace pogit
