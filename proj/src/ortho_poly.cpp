#include "pogit/ortho_poly.hpp"

#include <cmath>
#include <string>

#include "pogit/errors.hpp"

namespace pogit {

OrthoPolyBasis OrthoPolyBasis::fit(const Eigen::VectorXd& x, int degree) {
  const auto n = x.size();
  if (degree < 1) throw ConfigError("ortho poly: degree must be >= 1");
  if (n <= degree) {
    throw ConfigError("ortho poly: need more than degree=" +
                      std::to_string(degree) + " points, got " +
                      std::to_string(n));
  }

  OrthoPolyBasis basis;
  basis.degree_ = degree;
  basis.mean_ = x.mean();
  basis.min_ = x.minCoeff();
  basis.max_ = x.maxCoeff();

  Eigen::VectorXd xc = x.array() - basis.mean_;

  // q_0 = 1; q_{c+1}(t) = (t - alpha_c) q_c(t) - (norm2_c/norm2_{c-1}) q_{c-1}(t)
  Eigen::VectorXd q_prev = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd q_cur = Eigen::VectorXd::Ones(n);
  basis.norm2_.push_back(static_cast<double>(n));  // |q_0|^2
  for (int c = 0; c < degree; ++c) {
    double shift = xc.dot(q_cur.cwiseProduct(q_cur)) / basis.norm2_[c];
    Eigen::VectorXd q_next = (xc.array() - shift) * q_cur.array();
    if (c > 0) {
      double ratio = basis.norm2_[c] / basis.norm2_[c - 1];
      q_next -= ratio * q_prev;
    }
    q_prev = q_cur;
    q_cur = q_next;
    double n2 = q_cur.squaredNorm();
    if (!(n2 > 1e-12 * static_cast<double>(n))) {
      throw ConfigError("ortho poly: degenerate basis at degree " +
                        std::to_string(c + 1) +
                        " (x has too little variation)");
    }
    basis.alpha_.push_back(shift);
    basis.norm2_.push_back(n2);
  }
  return basis;
}

Eigen::MatrixXd OrthoPolyBasis::evaluate(const Eigen::VectorXd& x_new) const {
  const auto n = x_new.size();
  Eigen::MatrixXd out(n, degree_);
  Eigen::VectorXd xc = x_new.array() - mean_;
  Eigen::VectorXd q_prev = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd q_cur = Eigen::VectorXd::Ones(n);
  for (int c = 0; c < degree_; ++c) {
    Eigen::VectorXd q_next = (xc.array() - alpha_[c]) * q_cur.array();
    if (c > 0) {
      double ratio = norm2_[c] / norm2_[c - 1];
      q_next -= ratio * q_prev;
    }
    q_prev = q_cur;
    q_cur = q_next;
    out.col(c) = q_cur / std::sqrt(norm2_[c + 1]);
  }
  return out;
}

}  // namespace pogit
