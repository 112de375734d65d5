#pragma once

#include <Eigen/Core>
#include <functional>

#include "pogit/slice.hpp"

namespace pogit {

// Target interface for factor-direction updates. along() returns the
// log-target restricted to base + t * direction as a function of t;
// implementations may precompute projections of `direction` to make each
// evaluation cheap.
struct DirectionalTarget {
  virtual ~DirectionalTarget() = default;
  virtual std::function<double(double)> along(const Eigen::VectorXd& base,
                                              const Eigen::VectorXd& direction) = 0;
  // Called once per direction with the accepted offset t (possibly 0), so
  // implementations can update cached quantities.
  virtual void commit(double /*t*/) {}
};

struct AfssOptions {
  double initial_width = 1.0;
  double width_scale = 2.5;     // factor width = width_scale * sqrt(eigenvalue)
  int adaptation_interval = 100;
  int min_accum = 20;           // sweeps accumulated before the first refresh
  SliceOptions slice;
};

// Automated Factor Slice Sampler (Tibbits, Groendyke, Haran & Liechty
// 2014): univariate slice updates along the eigenvectors of the running
// empirical covariance of the block. Factors and interval widths refresh
// every adaptation_interval sweeps while adapting; freeze() pins the
// transition kernel for the retained phase.
class AfssSampler {
 public:
  AfssSampler(int dim, AfssOptions opts = {});

  // One sweep of slice updates along all current factor directions.
  void sweep(Eigen::VectorXd& x, DirectionalTarget& target, Rng& rng);

  // Record x into the running covariance and refresh factors when the
  // adaptation interval elapses. No-op after freeze().
  void adapt(const Eigen::VectorXd& x);

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  const Eigen::MatrixXd& factors() const { return factors_; }
  const Eigen::VectorXd& widths() const { return widths_; }
  const SliceStats& stats() const { return stats_; }

 private:
  void refresh_factors();

  int dim_;
  AfssOptions opts_;
  bool frozen_ = false;
  Eigen::MatrixXd factors_;  // columns are update directions
  Eigen::VectorXd widths_;
  SliceStats stats_;

  // Welford accumulation over adapt() calls.
  long long n_accum_ = 0;
  long long since_refresh_ = 0;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd m2_;
};

}  // namespace pogit
