#pragma once

#include <cmath>
#include <limits>

namespace pogit {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Sentinel used where a log of zero would otherwise propagate -inf into
// downstream summaries (e.g. log-MSE of a perfect replicate). Lies below
// log(DBL_MIN) so it cannot collide with a genuine value.
inline constexpr double kLogZeroSentinel = -746.0;

inline double logistic(double x) {
  // Stable in both tails.
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

// log(1 + exp(x)) without overflow.
inline double log1pexp(double x) {
  if (x > 35.0) return x;
  if (x < -35.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

inline double normal_logpdf(double x, double mean, double sd) {
  if (!(sd > 0.0)) return kNegInf;
  double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * M_PI);
}

// Half-Normal on (0, inf): zero-truncated N(0, scale^2).
inline double halfnormal_logpdf(double x, double scale) {
  if (!(x > 0.0) || !(scale > 0.0)) return kNegInf;
  double z = x / scale;
  return std::log(2.0) - 0.5 * z * z - std::log(scale) -
         0.5 * std::log(2.0 * M_PI);
}

// Poisson log-pmf via log-gamma; exact to double precision for counts up
// to far beyond 10^6.
inline double poisson_logpmf(long long z, double mean) {
  if (z < 0) return kNegInf;
  if (!(mean > 0.0)) return z == 0 && mean == 0.0 ? 0.0 : kNegInf;
  if (!std::isfinite(mean)) return kNegInf;
  return static_cast<double>(z) * std::log(mean) - mean -
         std::lgamma(static_cast<double>(z) + 1.0);
}

// Negative Binomial with mean `mean` and dispersion `disp` (variance
// mean + mean^2/disp).
inline double negbin_logpmf(long long z, double mean, double disp) {
  if (z < 0 || !(disp > 0.0)) return kNegInf;
  if (!(mean > 0.0)) return z == 0 && mean == 0.0 ? 0.0 : kNegInf;
  if (!std::isfinite(mean) || !std::isfinite(disp)) return kNegInf;
  double zd = static_cast<double>(z);
  return std::lgamma(disp + zd) - std::lgamma(disp) - std::lgamma(zd + 1.0) +
         disp * std::log(disp / (disp + mean)) +
         zd * std::log(mean / (disp + mean));
}

inline double binomial_logpmf(long long z, long long n, double p) {
  if (z < 0 || z > n) return kNegInf;
  double zd = static_cast<double>(z), nd = static_cast<double>(n);
  double lchoose =
      std::lgamma(nd + 1.0) - std::lgamma(zd + 1.0) - std::lgamma(nd - zd + 1.0);
  double lp = 0.0;
  if (z > 0) {
    if (!(p > 0.0)) return kNegInf;
    lp += zd * std::log(p);
  }
  if (z < n) {
    if (!(p < 1.0)) return kNegInf;
    lp += (nd - zd) * std::log1p(-p);
  }
  return lchoose + lp;
}

}  // namespace pogit
