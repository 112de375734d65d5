#include "pogit/model.hpp"

#include <cmath>
#include <string>

#include "pogit/errors.hpp"
#include "pogit/math.hpp"

namespace pogit {

ParameterState ParameterState::initial(const ModelSpec& spec,
                                       const CountDataset& data) {
  ParameterState s;
  s.alpha = Eigen::VectorXd::Zero(1 + data.X.cols());
  s.alpha[0] = spec.priors.alpha0_mean;
  s.beta = Eigen::VectorXd::Zero(1 + data.W.cols());
  s.beta[0] = spec.priors.beta0_mean;
  if (spec.include_icar) s.phi = Eigen::VectorXd::Zero(data.n_regions());
  if (spec.include_iid_process)
    s.theta_re = Eigen::VectorXd::Zero(data.n_regions());
  if (spec.include_iid_reporting)
    s.gamma_re = Eigen::VectorXd::Zero(data.n_obs());
  return s;
}

namespace {

void check_dims(const ParameterState& state, const CountDataset& data,
                const ModelSpec& spec) {
  if (state.alpha.size() != 1 + data.X.cols()) {
    throw ConfigError("state: alpha has " + std::to_string(state.alpha.size()) +
                      " entries, expected " + std::to_string(1 + data.X.cols()));
  }
  if (state.beta.size() != 1 + data.W.cols()) {
    throw ConfigError("state: beta has " + std::to_string(state.beta.size()) +
                      " entries, expected " + std::to_string(1 + data.W.cols()));
  }
  if (spec.include_icar && state.phi.size() != data.n_regions())
    throw ConfigError("state: phi length does not match region count");
  if (spec.include_iid_process && state.theta_re.size() != data.n_regions())
    throw ConfigError("state: theta_re length does not match region count");
  if (spec.include_iid_reporting && state.gamma_re.size() != data.n_obs())
    throw ConfigError("state: gamma_re length does not match n_obs");
}

}  // namespace

Eigen::VectorXd linear_predictor_lambda(const ParameterState& state,
                                        const CountDataset& data,
                                        const ModelSpec& spec) {
  check_dims(state, data, spec);
  Eigen::VectorXd eta = data.offset.array() + state.alpha[0];
  if (data.X.cols() > 0) eta += data.X * state.alpha.tail(data.X.cols());
  if (spec.include_icar || spec.include_iid_process) {
    for (int i = 0; i < data.n_obs(); ++i) {
      int s = data.units.region[i];
      if (spec.include_icar) eta[i] += state.phi[s];
      if (spec.include_iid_process) eta[i] += state.theta_re[s];
    }
  }
  return eta;
}

Eigen::VectorXd reporting_probability(const ParameterState& state,
                                      const CountDataset& data,
                                      const ModelSpec& spec) {
  check_dims(state, data, spec);
  Eigen::VectorXd eta = Eigen::VectorXd::Constant(data.n_obs(), state.beta[0]);
  if (data.W.cols() > 0) eta += data.W * state.beta.tail(data.W.cols());
  Eigen::VectorXd pi(data.n_obs());
  for (int i = 0; i < data.n_obs(); ++i) {
    if (data.complete[i]) {
      pi[i] = 1.0;
    } else {
      double e = eta[i];
      if (spec.include_iid_reporting) e += state.gamma_re[i];
      pi[i] = logistic(e);
    }
  }
  return pi;
}

double count_logpmf(const ModelSpec& spec, long long z, double mean,
                    double dispersion) {
  return spec.family == Family::kPoisson
             ? poisson_logpmf(z, mean)
             : negbin_logpmf(z, mean, dispersion);
}

double marginal_log_likelihood(const ParameterState& state,
                               const CountDataset& data,
                               const ModelSpec& spec) {
  Eigen::VectorXd log_lam = linear_predictor_lambda(state, data, spec);
  Eigen::VectorXd pi = reporting_probability(state, data, spec);
  double total = 0.0;
  for (int i = 0; i < data.n_obs(); ++i) {
    if (std::isnan(log_lam[i])) {
      throw NumericalError("likelihood: NaN linear predictor at observation " +
                           std::to_string(i));
    }
    double mean = pi[i] * std::exp(log_lam[i]);
    total += count_logpmf(spec, data.z[i], mean, state.dispersion);
    if (total == kNegInf) return kNegInf;
  }
  return total;
}

double icar_pairwise_sum(const Eigen::VectorXd& phi,
                         const AdjacencyGraph& graph) {
  double q = 0.0;
  for (int s = 0; s < graph.n_regions(); ++s) {
    for (int t : graph.neighbors(s)) {
      if (t > s) {
        double d = phi[s] - phi[t];
        q += d * d;
      }
    }
  }
  return q;
}

double icar_log_density(const Eigen::VectorXd& phi, double nu,
                        const AdjacencyGraph& graph, double tol) {
  if (phi.size() != graph.n_regions())
    throw ConfigError("icar: phi length does not match region count");
  if (!(nu > 0.0)) return kNegInf;
  Eigen::VectorXd comp_sum = Eigen::VectorXd::Zero(graph.n_components());
  for (int s = 0; s < graph.n_regions(); ++s)
    comp_sum[graph.component(s)] += phi[s];
  for (int g = 0; g < graph.n_components(); ++g) {
    if (std::fabs(comp_sum[g]) > tol) {
      throw ConfigError("icar: phi does not sum to zero on component " +
                        std::to_string(g));
    }
  }
  double q = icar_pairwise_sum(phi, graph);
  return -q / (2.0 * nu * nu) - graph.icar_rank() * std::log(nu);
}

double log_prior(const ParameterState& state, const CountDataset& data,
                 const ModelSpec& spec) {
  check_dims(state, data, spec);
  const PriorSpec& p = spec.priors;
  double lp = normal_logpdf(state.alpha[0], p.alpha0_mean, p.alpha0_sd) +
              normal_logpdf(state.beta[0], p.beta0_mean, p.beta0_sd);
  for (int k = 1; k < state.alpha.size(); ++k)
    lp += normal_logpdf(state.alpha[k], 0.0, p.coef_sd);
  for (int j = 1; j < state.beta.size(); ++j)
    lp += normal_logpdf(state.beta[j], 0.0, p.coef_sd);
  if (spec.include_icar) {
    lp += halfnormal_logpdf(state.nu, p.halfnormal_scale);
    if (lp == kNegInf) return kNegInf;
    lp += icar_log_density(state.phi, state.nu, data.graph);
  }
  if (spec.include_iid_process) {
    lp += halfnormal_logpdf(state.sigma, p.halfnormal_scale);
    if (lp == kNegInf) return kNegInf;
    for (int s = 0; s < state.theta_re.size(); ++s)
      lp += normal_logpdf(state.theta_re[s], 0.0, state.sigma);
  }
  if (spec.include_iid_reporting) {
    lp += halfnormal_logpdf(state.epsilon, p.halfnormal_scale);
    if (lp == kNegInf) return kNegInf;
    for (int i = 0; i < state.gamma_re.size(); ++i)
      lp += normal_logpdf(state.gamma_re[i], 0.0, state.epsilon);
  }
  if (spec.family == Family::kNegBinomial)
    lp += halfnormal_logpdf(state.dispersion, p.dispersion_scale);
  return lp;
}

double log_posterior(const ParameterState& state, const CountDataset& data,
                     const ModelSpec& spec) {
  double lp = log_prior(state, data, spec);
  if (lp == kNegInf) return kNegInf;
  return lp + marginal_log_likelihood(state, data, spec);
}

}  // namespace pogit
