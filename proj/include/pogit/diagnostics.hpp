#pragma once

#include <Eigen/Core>
#include <vector>

namespace pogit {

// Split-chain potential scale reduction factor (Gelman-Rubin):
//   sqrt((n-1)/n + B/(n W))
// over the half-chains. Returns NaN when every half-chain has zero
// within-chain variance (degenerate draws).
double psrf(const std::vector<Eigen::VectorXd>& chains);

// Effective sample size by Geyer's initial positive sequence estimator,
// computed per chain and summed. Returns NaN for constant chains.
double effective_sample_size(const std::vector<Eigen::VectorXd>& chains);

}  // namespace pogit
