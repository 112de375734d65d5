#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "pogit/math.hpp"

namespace pogit {

// All variate generators are implemented here rather than through
// std::*_distribution, whose output is implementation-defined. Every draw
// is a pure function of the mt19937_64 stream, so runs are reproducible
// bit-for-bit from (seed, stream index) on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Derives an independent stream for (seed, index) via splitmix64 so that
  // chains, experiment cells and prediction draws never share a stream.
  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    return Rng(splitmix64(x));
  }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  // U[0, 1)
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // U(0, 1]
  double uniform_pos() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double exponential() { return -std::log(uniform_pos()); }

  // Marsaglia polar method; no cached spare so that consumption of the
  // underlying stream stays easy to reason about.
  double normal() {
    for (;;) {
      double u = 2.0 * uniform() - 1.0;
      double v = 2.0 * uniform() - 1.0;
      double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) {
        return u * std::sqrt(-2.0 * std::log(s) / s);
      }
    }
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Marsaglia-Tsang for shape >= 1, boosted for shape < 1.
  double gamma(double shape, double rate) {
    if (shape < 1.0) {
      double u = uniform_pos();
      return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
        return d * v / rate;
    }
  }

  double beta(double a, double b) {
    double x = gamma(a, 1.0);
    double y = gamma(b, 1.0);
    return x / (x + y);
  }

  long long poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    if (mean < 10.0) return poisson_inversion(mean);
    return poisson_ptrs(mean);
  }

  long long bernoulli(double p) { return uniform() < p ? 1 : 0; }

  // Exact binomial: direct Bernoulli summation for small n, otherwise the
  // beta-splitting recursion (Devroye 1986, ch. X), which needs only
  // O(log n) beta draws and has no large-n underflow issues.
  long long binomial(long long n, double p) {
    if (n <= 0) return 0;
    if (p <= 0.0) return 0;
    if (p >= 1.0) return n;
    long long count = 0;
    while (n > 64) {
      long long i = (n + 1) / 2;
      double b = beta(static_cast<double>(i), static_cast<double>(n - i + 1));
      if (p >= b) {
        count += i;
        p = (p - b) / (1.0 - b);
        n -= i;
      } else {
        p = p / b;
        n = i - 1;
      }
      if (p <= 0.0) return count;
      if (p >= 1.0) return count + n;
    }
    for (long long t = 0; t < n; ++t) count += bernoulli(p);
    return count;
  }

  // NegBin(mean, dispersion) via the gamma-Poisson mixture.
  long long negbin(double mean, double disp) {
    if (!(mean > 0.0)) return 0;
    double g = gamma(disp, disp / mean);
    return poisson(g);
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  long long poisson_inversion(double mean) {
    double emu = std::exp(-mean);
    double prod = 1.0;
    long long k = -1;
    do {
      ++k;
      prod *= uniform();
    } while (prod > emu);
    return k;
  }

  // Transformed rejection with squeeze (Hormann 1993), for mean >= 10.
  long long poisson_ptrs(double mean) {
    double slam = std::sqrt(mean);
    double loglam = std::log(mean);
    double b = 0.931 + 2.53 * slam;
    double a = -0.059 + 0.02483 * b;
    double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      double u = uniform() - 0.5;
      double v = uniform();
      double us = 0.5 - std::fabs(u);
      double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= vr) return static_cast<long long>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
          kf * loglam - mean - std::lgamma(kf + 1.0)) {
        return static_cast<long long>(kf);
      }
    }
  }

  std::mt19937_64 engine_;
};

}  // namespace pogit
