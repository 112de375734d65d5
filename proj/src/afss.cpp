#include "pogit/afss.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

namespace pogit {

AfssSampler::AfssSampler(int dim, AfssOptions opts)
    : dim_(dim),
      opts_(opts),
      factors_(Eigen::MatrixXd::Identity(dim, dim)),
      widths_(Eigen::VectorXd::Constant(dim, opts.initial_width)),
      mean_(Eigen::VectorXd::Zero(dim)),
      m2_(Eigen::MatrixXd::Zero(dim, dim)) {}

void AfssSampler::sweep(Eigen::VectorXd& x, DirectionalTarget& target,
                        Rng& rng) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (int j = 0; j < dim_; ++j) {
    Eigen::VectorXd dir = factors_.col(j);
    auto g = target.along(x, dir);
    double t = slice_update_scalar(0.0, g, widths_[j], -inf, inf, rng,
                                   opts_.slice, &stats_);
    if (t != 0.0) x += t * dir;
    target.commit(t);
  }
}

void AfssSampler::adapt(const Eigen::VectorXd& x) {
  if (frozen_) return;
  ++n_accum_;
  Eigen::VectorXd delta = x - mean_;
  mean_ += delta / static_cast<double>(n_accum_);
  m2_ += delta * (x - mean_).transpose();
  ++since_refresh_;
  if (since_refresh_ >= opts_.adaptation_interval &&
      n_accum_ >= opts_.min_accum) {
    refresh_factors();
    since_refresh_ = 0;
  }
}

void AfssSampler::refresh_factors() {
  Eigen::MatrixXd cov = m2_ / static_cast<double>(n_accum_ - 1);
  // Symmetrize and ridge against near-degenerate directions early in the
  // accumulation.
  cov = 0.5 * (cov + cov.transpose());
  double ridge = 1e-10 * std::max(1.0, cov.trace() / dim_);
  cov.diagonal().array() += ridge;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) return;
  factors_ = eig.eigenvectors();
  // Fix a sign convention so runs are reproducible across refreshes.
  for (int j = 0; j < dim_; ++j) {
    for (int i = 0; i < dim_; ++i) {
      if (std::fabs(factors_(i, j)) > 1e-12) {
        if (factors_(i, j) < 0.0) factors_.col(j) = -factors_.col(j);
        break;
      }
    }
  }
  for (int j = 0; j < dim_; ++j) {
    double ev = std::max(eig.eigenvalues()[j], 1e-12);
    widths_[j] = opts_.width_scale * std::sqrt(ev);
  }
}

}  // namespace pogit
