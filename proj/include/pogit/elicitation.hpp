#pragma once

#include <cstdint>
#include <vector>

namespace pogit {

// A published detection-rate estimate with its 95% confidence interval,
// all on the probability scale.
struct RateEstimate {
  double point = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// A Normal approximation on the logistic (logit) scale.
struct LogitNormal {
  double mean = 0.0;
  double sd = 0.0;
};

// Fits N(logit(point), sd^2) where sd minimizes the squared probability-
// scale mismatch of the mapped 2.5%/97.5% quantiles against the stated CI.
// Probabilities equal to 1 are clamped to 1 - 1e-6 before the logit.
// Throws ConfigError for an infeasible (zero-width) CI or out-of-order
// inputs.
LogitNormal approximate_rate_distribution(double point, double ci_low,
                                          double ci_high);

// Comonotone pooling of yearly rate distributions (the sorted-samples
// construction): draw n_sims from each year's Normal, sort each sample
// ascending, average across years per rank, then fit a Normal by moments.
// Averaging is on the logistic scale by default; the probability-scale
// variant maps to probabilities before averaging and back through the
// logit after.
LogitNormal elicit_beta0_prior(const std::vector<LogitNormal>& yearly,
                               int n_sims, std::uint64_t seed,
                               bool average_on_probability_scale = false);

LogitNormal elicit_beta0_prior(const std::vector<RateEstimate>& yearly,
                               int n_sims, std::uint64_t seed,
                               bool average_on_probability_scale = false);

}  // namespace pogit
