#include "pogit/elicitation.hpp"

#include <algorithm>
#include <cmath>

#include "pogit/digest.hpp"
#include "pogit/errors.hpp"
#include "pogit/math.hpp"
#include "pogit/rng.hpp"

namespace pogit {

namespace {

constexpr double kProbClamp = 1.0 - 1e-6;
constexpr double kZ975 = 1.959963984540054;  // Phi^-1(0.975)

double clamp_prob(double p) {
  if (p >= 1.0) return kProbClamp;
  if (p <= 0.0) return 1.0 - kProbClamp;
  return p;
}

}  // namespace

LogitNormal approximate_rate_distribution(double point, double ci_low,
                                          double ci_high) {
  if (!(ci_low <= point && point <= ci_high) || !(ci_low > 0.0) ||
      !(ci_high <= 1.0)) {
    throw ConfigError("elicitation: need 0 < ci_low <= point <= ci_high <= 1");
  }
  if (!(ci_high - ci_low > 0.0)) {
    throw ConfigError("elicitation: zero-width confidence interval");
  }
  double mean = logit(clamp_prob(point));
  double lo = clamp_prob(ci_low);
  double hi = clamp_prob(ci_high);

  auto objective = [&](double sd) {
    double e_lo = logistic(mean - kZ975 * sd) - lo;
    double e_hi = logistic(mean + kZ975 * sd) - hi;
    return e_lo * e_lo + e_hi * e_hi;
  };

  // Coarse grid then golden-section refinement; the objective is smooth
  // and effectively unimodal over this range.
  double best_sd = 1e-4, best = objective(best_sd);
  for (int i = 1; i <= 400; ++i) {
    double sd = 20.0 * i / 400.0;
    double val = objective(sd);
    if (val < best) {
      best = val;
      best_sd = sd;
    }
  }
  double a = std::max(1e-6, best_sd - 0.1), b = best_sd + 0.1;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  for (int it = 0; it < 200; ++it) {
    if (objective(c) < objective(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - gr * (b - a);
    d = a + gr * (b - a);
  }
  return {mean, 0.5 * (a + b)};
}

LogitNormal elicit_beta0_prior(const std::vector<LogitNormal>& yearly,
                               int n_sims, std::uint64_t seed,
                               bool average_on_probability_scale) {
  if (yearly.size() < 2)
    throw ConfigError("elicitation: need at least 2 yearly estimates");
  if (n_sims < 2) throw ConfigError("elicitation: n_sims too small");

  // Canonical order makes the accumulation independent of input order.
  std::vector<LogitNormal> years = yearly;
  std::sort(years.begin(), years.end(), [](const LogitNormal& a, const LogitNormal& b) {
    return a.mean != b.mean ? a.mean < b.mean : a.sd < b.sd;
  });

  const auto n = static_cast<std::size_t>(n_sims);
  std::vector<double> pooled(n, 0.0);
  std::vector<double> draws(n);
  for (std::size_t y = 0; y < years.size(); ++y) {
    // Stream keyed by the estimate's value, not its position, so the
    // result does not depend on the order the years are supplied in.
    std::string key(reinterpret_cast<const char*>(&years[y]),
                    sizeof(LogitNormal));
    Rng rng = Rng::stream(seed, fnv1a64(key));
    for (auto& v : draws) v = rng.normal(years[y].mean, years[y].sd);
    std::sort(draws.begin(), draws.end());
    if (average_on_probability_scale) {
      for (std::size_t i = 0; i < n; ++i) pooled[i] += logistic(draws[i]);
    } else {
      for (std::size_t i = 0; i < n; ++i) pooled[i] += draws[i];
    }
  }
  const double k = static_cast<double>(years.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    pooled[i] /= k;
    if (average_on_probability_scale) pooled[i] = logit(clamp_prob(pooled[i]));
    mean += pooled[i];
  }
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : pooled) ss += (v - mean) * (v - mean);
  double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return {mean, sd};
}

LogitNormal elicit_beta0_prior(const std::vector<RateEstimate>& yearly,
                               int n_sims, std::uint64_t seed,
                               bool average_on_probability_scale) {
  std::vector<LogitNormal> fitted;
  fitted.reserve(yearly.size());
  for (const auto& e : yearly)
    fitted.push_back(approximate_rate_distribution(e.point, e.ci_low, e.ci_high));
  return elicit_beta0_prior(fitted, n_sims, seed, average_on_probability_scale);
}

}  // namespace pogit
