#include "pogit/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "pogit/errors.hpp"

namespace pogit {

namespace {

double mean_of(const Eigen::VectorXd& v) { return v.mean(); }

double var_of(const Eigen::VectorXd& v) {
  if (v.size() < 2) return 0.0;
  double m = v.mean();
  return (v.array() - m).square().sum() / static_cast<double>(v.size() - 1);
}

}  // namespace

double psrf(const std::vector<Eigen::VectorXd>& chains) {
  if (chains.size() < 2) throw ConfigError("psrf: need at least 2 chains");
  // Split every chain in half; drop the middle element when odd.
  std::vector<Eigen::VectorXd> halves;
  for (const auto& c : chains) {
    auto n = c.size();
    if (n < 20) throw ConfigError("psrf: need at least 10 draws per half");
    auto h = n / 2;
    halves.push_back(c.head(h));
    halves.push_back(c.tail(h));
  }
  const auto m = static_cast<double>(halves.size());
  const auto n = static_cast<double>(halves.front().size());

  double w = 0.0;
  Eigen::VectorXd means(halves.size());
  for (std::size_t i = 0; i < halves.size(); ++i) {
    means[static_cast<Eigen::Index>(i)] = mean_of(halves[i]);
    w += var_of(halves[i]);
  }
  w /= m;
  if (!(w > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  double grand = means.mean();
  double b = n / (m - 1.0) * (means.array() - grand).square().sum();
  return std::sqrt((n - 1.0) / n + b / (n * w));
}

namespace {

double ess_single(const Eigen::VectorXd& chain) {
  const auto n = chain.size();
  double m = chain.mean();
  Eigen::VectorXd centered = chain.array() - m;
  double c0 = centered.squaredNorm() / static_cast<double>(n);
  if (!(c0 > 0.0)) return std::numeric_limits<double>::quiet_NaN();

  // Geyer initial positive sequence: sum lag pairs while positive.
  double tau = 1.0;
  for (Eigen::Index lag = 1; lag + 1 < n; lag += 2) {
    double g1 = centered.head(n - lag).dot(centered.tail(n - lag)) /
                static_cast<double>(n) / c0;
    double g2 = centered.head(n - lag - 1).dot(centered.tail(n - lag - 1)) /
                static_cast<double>(n) / c0;
    double pair = g1 + g2;
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  return static_cast<double>(n) / tau;
}

}  // namespace

double effective_sample_size(const std::vector<Eigen::VectorXd>& chains) {
  if (chains.empty()) throw ConfigError("ess: no chains");
  double total = 0.0;
  for (const auto& c : chains) {
    if (c.size() < 100) throw ConfigError("ess: need at least 100 draws");
    double e = ess_single(c);
    if (std::isnan(e)) return e;
    total += e;
  }
  return total;
}

}  // namespace pogit
