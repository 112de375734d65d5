#pragma once

#include <Eigen/Core>
#include <vector>

namespace pogit {

// Centered orthogonal polynomial basis over a set of training points,
// built with the Forsythe three-term recurrence. On the training points
// the columns are mutually orthogonal with zero means, and each column is
// normalized to unit sum of squares. That normalization convention is
// fixed: posterior coefficients are only comparable across runs because
// of it.
//
// The stored recurrence constants allow evaluation at arbitrary new
// points, reproducing the training expansion exactly on the training set.
class OrthoPolyBasis {
 public:
  OrthoPolyBasis() = default;

  // Throws ConfigError when x has fewer than degree+1 points or a column
  // degenerates (e.g. zero variance in x).
  static OrthoPolyBasis fit(const Eigen::VectorXd& x, int degree);

  // n x degree matrix of basis columns (degree-1 term first; the constant
  // column is implicit and omitted).
  Eigen::MatrixXd evaluate(const Eigen::VectorXd& x_new) const;

  int degree() const { return degree_; }
  double train_mean() const { return mean_; }
  double train_min() const { return min_; }
  double train_max() const { return max_; }

 private:
  int degree_ = 0;
  double mean_ = 0.0;  // centering constant; recurrence runs on x - mean
  double min_ = 0.0, max_ = 0.0;
  std::vector<double> alpha_;  // recurrence shifts on centered scale
  std::vector<double> norm2_;  // squared norms of the raw recurrence columns
};

}  // namespace pogit
