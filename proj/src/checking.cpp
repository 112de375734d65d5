#include "pogit/checking.hpp"

#include <cmath>
#include <memory>

#include "pogit/errors.hpp"
#include "pogit/math.hpp"
#include "pogit/rng.hpp"
#include "pogit/simulation.hpp"

namespace pogit {

Eigen::VectorXd predictive_stat(const CountMatrix& replicates,
                                const Eigen::VectorXi& z, PredStat stat) {
  if (replicates.cols() != z.size())
    throw ConfigError("predictive stat: replicate/observation mismatch");
  const auto n = static_cast<double>(replicates.cols());
  Eigen::VectorXd out(replicates.rows());
  for (Eigen::Index d = 0; d < replicates.rows(); ++d) {
    double mean = 0.0;
    for (Eigen::Index i = 0; i < replicates.cols(); ++i)
      mean += static_cast<double>(replicates(d, i));
    mean /= n;
    switch (stat) {
      case PredStat::kSampleMean:
        out[d] = mean;
        break;
      case PredStat::kSampleVariance: {
        double ss = 0.0;
        for (Eigen::Index i = 0; i < replicates.cols(); ++i) {
          double dev = static_cast<double>(replicates(d, i)) - mean;
          ss += dev * dev;
        }
        out[d] = ss / (n - 1.0);
        break;
      }
      case PredStat::kLogMse: {
        double mse = 0.0;
        for (Eigen::Index i = 0; i < replicates.cols(); ++i) {
          double dev = static_cast<double>(replicates(d, i) - z[i]);
          mse += dev * dev;
        }
        mse /= n;
        out[d] = mse > 0.0 ? std::log(mse) : kLogZeroSentinel;
        break;
      }
    }
  }
  return out;
}

CountMatrix prior_predictive_draws(const ModelSpec& spec,
                                   const CountDataset& data, int n_draws,
                                   std::uint64_t seed) {
  spec.validate();
  const PriorSpec& p = spec.priors;
  CountMatrix out(n_draws, data.n_obs());

  std::unique_ptr<IcarSampler> icar;
  if (spec.include_icar) icar = std::make_unique<IcarSampler>(data.graph);

  for (int d = 0; d < n_draws; ++d) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(d));
    ParameterState state = ParameterState::initial(spec, data);
    state.alpha[0] = rng.normal(p.alpha0_mean, p.alpha0_sd);
    for (int k = 1; k < state.alpha.size(); ++k)
      state.alpha[k] = rng.normal(0.0, p.coef_sd);
    state.beta[0] = rng.normal(p.beta0_mean, p.beta0_sd);
    for (int j = 1; j < state.beta.size(); ++j)
      state.beta[j] = rng.normal(0.0, p.coef_sd);
    if (spec.include_iid_process) {
      state.sigma = std::fabs(rng.normal(0.0, p.halfnormal_scale));
      for (int s = 0; s < state.theta_re.size(); ++s)
        state.theta_re[s] = rng.normal(0.0, state.sigma);
    }
    if (spec.include_icar) {
      state.nu = std::fabs(rng.normal(0.0, p.halfnormal_scale));
      state.phi = icar->draw(state.nu, rng);
    }
    if (spec.include_iid_reporting) {
      state.epsilon = std::fabs(rng.normal(0.0, p.halfnormal_scale));
      for (int i = 0; i < state.gamma_re.size(); ++i)
        state.gamma_re[i] = rng.normal(0.0, state.epsilon);
    }
    if (spec.family == Family::kNegBinomial)
      state.dispersion = std::fabs(rng.normal(0.0, p.dispersion_scale));

    Eigen::VectorXd log_lam = linear_predictor_lambda(state, data, spec);
    Eigen::VectorXd pi = reporting_probability(state, data, spec);
    for (int i = 0; i < data.n_obs(); ++i) {
      double mean = pi[i] * std::exp(log_lam[i]);
      out(d, i) = spec.family == Family::kPoisson
                      ? rng.poisson(mean)
                      : rng.negbin(mean, state.dispersion);
    }
  }
  return out;
}

}  // namespace pogit
