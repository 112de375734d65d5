#pragma once

#include <cstdint>

#include "pogit/prediction.hpp"

namespace pogit {

enum class PredStat { kSampleMean, kSampleVariance, kLogMse };

// Per-draw checking statistic of the replicates against the observed
// counts: sample mean, sample variance (n-1 denominator), or the natural
// log of the mean squared error. A zero MSE maps to kLogZeroSentinel.
Eigen::VectorXd predictive_stat(const CountMatrix& replicates,
                                const Eigen::VectorXi& z, PredStat stat);

// Replicates of the observed counts under the prior: parameters drawn from
// their priors (phi from the sum-to-zero Gaussian surrogate on the graph
// Laplacian's non-null eigenspace), then z~ from the marginal observation
// model.
CountMatrix prior_predictive_draws(const ModelSpec& spec,
                                   const CountDataset& data, int n_draws,
                                   std::uint64_t seed);

}  // namespace pogit
