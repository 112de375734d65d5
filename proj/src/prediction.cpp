#include "pogit/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pogit/errors.hpp"
#include "pogit/math.hpp"
#include "pogit/rng.hpp"

namespace pogit {

namespace {

// Applies fn(draw_index, state, log_lam, pi) over pooled posterior draws.
template <typename Fn>
void for_each_draw(const PosteriorSamples& samples, const CountDataset& data,
                   const ModelSpec& spec, Fn&& fn) {
  int d = 0;
  for (const auto& chain : samples.chains) {
    for (Eigen::Index r = 0; r < chain.rows(); ++r, ++d) {
      ParameterState state = samples.layout.unpack(chain.row(r));
      Eigen::VectorXd log_lam = linear_predictor_lambda(state, data, spec);
      Eigen::VectorXd pi = reporting_probability(state, data, spec);
      fn(d, state, log_lam, pi);
    }
  }
}

int total_draws(const PosteriorSamples& samples) {
  int total = 0;
  for (const auto& c : samples.chains) total += static_cast<int>(c.rows());
  return total;
}

}  // namespace

CountMatrix sample_true_counts(const PosteriorSamples& samples,
                               const CountDataset& data, const ModelSpec& spec,
                               std::uint64_t seed) {
  CountMatrix y(total_draws(samples), data.n_obs());
  for_each_draw(samples, data, spec,
                [&](int d, const ParameterState& state,
                    const Eigen::VectorXd& log_lam, const Eigen::VectorXd& pi) {
                  Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(d));
                  for (int i = 0; i < data.n_obs(); ++i) {
                    long long z = data.z[i];
                    if (data.complete[i]) {
                      y(d, i) = z;
                      continue;
                    }
                    double lam = std::exp(log_lam[i]);
                    double rest = (1.0 - pi[i]) * lam;
                    if (spec.family == Family::kNegBinomial) {
                      double u = rng.gamma(state.dispersion + z,
                                           state.dispersion + pi[i] * lam);
                      rest = (1.0 - pi[i]) * lam * u;
                    }
                    y(d, i) = z + rng.poisson(rest);
                  }
                });
  return y;
}

CountMatrix replicate_observed(const PosteriorSamples& samples,
                               const CountDataset& data, const ModelSpec& spec,
                               std::uint64_t seed) {
  CountMatrix rep(total_draws(samples), data.n_obs());
  for_each_draw(samples, data, spec,
                [&](int d, const ParameterState& state,
                    const Eigen::VectorXd& log_lam, const Eigen::VectorXd& pi) {
                  Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(d));
                  for (int i = 0; i < data.n_obs(); ++i) {
                    double mean = pi[i] * std::exp(log_lam[i]);
                    rep(d, i) = spec.family == Family::kPoisson
                                    ? rng.poisson(mean)
                                    : rng.negbin(mean, state.dispersion);
                  }
                });
  return rep;
}

double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw ConfigError("quantile: no values");
  std::sort(values.begin(), values.end());
  auto n = static_cast<long>(values.size());
  long k = static_cast<long>(std::ceil(p * static_cast<double>(n)));
  k = std::clamp(k, 1L, n);
  return values[static_cast<std::size_t>(k - 1)];
}

IntervalTable predictive_intervals(const CountMatrix& draws, double level) {
  if (!(level > 0.0 && level < 1.0))
    throw ConfigError("intervals: level must be in (0,1)");
  if (draws.rows() < 100)
    throw ConfigError("intervals: need at least 100 draws");
  double lo_p = (1.0 - level) / 2.0;
  IntervalTable out;
  out.lower.resize(draws.cols());
  out.upper.resize(draws.cols());
  std::vector<double> column(draws.rows());
  for (Eigen::Index i = 0; i < draws.cols(); ++i) {
    for (Eigen::Index d = 0; d < draws.rows(); ++d)
      column[static_cast<std::size_t>(d)] = static_cast<double>(draws(d, i));
    out.lower[i] = empirical_quantile(column, lo_p);
    out.upper[i] = empirical_quantile(column, 1.0 - lo_p);
  }
  return out;
}

double coverage(const IntervalTable& intervals, const Eigen::VectorXd& truth) {
  if (intervals.lower.size() != truth.size())
    throw ConfigError("coverage: length mismatch");
  int inside = 0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    if (truth[i] >= intervals.lower[i] && truth[i] <= intervals.upper[i])
      ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(truth.size());
}

EffectCurve effect_curve(const PosteriorSamples& samples,
                         const FittedTerm& term, Side side,
                         const Eigen::VectorXd& grid, double level,
                         double guard_fraction) {
  if (!(level > 0.0 && level < 1.0))
    throw ConfigError("effect curve: level must be in (0,1)");
  Eigen::MatrixXd basis = term.basis.evaluate(grid);

  // Paired coefficient columns in the draw rows: intercepts sit at index 0
  // of each block, term columns follow col_start.
  int offset = side == Side::kProcess
                   ? 1 + term.col_start
                   : samples.layout.n_alpha + 1 + term.col_start;

  int n_draws = 0;
  for (const auto& c : samples.chains) n_draws += static_cast<int>(c.rows());
  Eigen::MatrixXd coefs(n_draws, term.degree);
  int d = 0;
  for (const auto& chain : samples.chains) {
    coefs.middleRows(d, chain.rows()) =
        chain.middleCols(offset, term.degree);
    d += static_cast<int>(chain.rows());
  }

  Eigen::MatrixXd f = basis * coefs.transpose();  // grid x draws
  EffectCurve out;
  out.grid = grid;
  out.mean = f.rowwise().mean();
  out.lower.resize(grid.size());
  out.upper.resize(grid.size());
  double lo_p = (1.0 - level) / 2.0;
  std::vector<double> row(n_draws);
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    for (int k = 0; k < n_draws; ++k) row[static_cast<std::size_t>(k)] = f(g, k);
    out.lower[g] = empirical_quantile(row, lo_p);
    out.upper[g] = empirical_quantile(row, 1.0 - lo_p);
  }
  double span = term.basis.train_max() - term.basis.train_min();
  double lo_guard = term.basis.train_min() - guard_fraction * span;
  double hi_guard = term.basis.train_max() + guard_fraction * span;
  out.extrapolated.resize(grid.size());
  for (Eigen::Index g = 0; g < grid.size(); ++g)
    out.extrapolated[g] = grid[g] < lo_guard || grid[g] > hi_guard;
  return out;
}

RateSummary reporting_rate_summary(const PosteriorSamples& samples,
                                   const CountDataset& data,
                                   const ModelSpec& spec, double level) {
  int n_draws = total_draws(samples);
  Eigen::MatrixXd pis(n_draws, data.n_obs());
  for_each_draw(samples, data, spec,
                [&](int d, const ParameterState&, const Eigen::VectorXd&,
                    const Eigen::VectorXd& pi) { pis.row(d) = pi; });
  RateSummary out;
  out.mean = pis.colwise().mean();
  out.lower.resize(data.n_obs());
  out.upper.resize(data.n_obs());
  double lo_p = (1.0 - level) / 2.0;
  std::vector<double> column(n_draws);
  for (int i = 0; i < data.n_obs(); ++i) {
    for (int d = 0; d < n_draws; ++d)
      column[static_cast<std::size_t>(d)] = pis(d, i);
    out.lower[i] = empirical_quantile(column, lo_p);
    out.upper[i] = empirical_quantile(column, 1.0 - lo_p);
  }
  return out;
}

GroupTotals total_unreported_quantiles(const CountMatrix& y,
                                       const CountDataset& data,
                                       const std::vector<int>& labels,
                                       const std::vector<double>& levels) {
  if (static_cast<int>(labels.size()) != data.n_obs())
    throw ConfigError("totals: label length mismatch");
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < data.n_obs(); ++i) groups[labels[i]].push_back(i);

  GroupTotals out;
  out.quantiles.resize(static_cast<Eigen::Index>(groups.size()),
                       static_cast<Eigen::Index>(levels.size()));
  int g = 0;
  std::vector<double> totals(static_cast<std::size_t>(y.rows()));
  for (const auto& [label, members] : groups) {
    out.labels.push_back(label);
    long long observed = 0;
    for (int i : members) observed += data.z[i];
    out.observed.push_back(observed);
    for (Eigen::Index d = 0; d < y.rows(); ++d) {
      long long t = 0;
      for (int i : members) t += y(d, i) - data.z[i];
      totals[static_cast<std::size_t>(d)] = static_cast<double>(t);
    }
    for (std::size_t q = 0; q < levels.size(); ++q) {
      out.quantiles(g, static_cast<Eigen::Index>(q)) =
          empirical_quantile(totals, levels[q]);
    }
    ++g;
  }
  return out;
}

}  // namespace pogit
