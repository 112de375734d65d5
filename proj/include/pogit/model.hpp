#pragma once

#include <Eigen/Core>

#include "pogit/data.hpp"
#include "pogit/graph.hpp"
#include "pogit/model_spec.hpp"

namespace pogit {

// One full point in parameter space. Vectors not used by the spec (e.g.
// phi when the ICAR effect is off) are left empty.
struct ParameterState {
  Eigen::VectorXd alpha;     // process coefficients, alpha[0] = intercept
  Eigen::VectorXd beta;      // reporting coefficients, beta[0] = intercept
  Eigen::VectorXd phi;       // ICAR effect per region, sums to zero per component
  Eigen::VectorXd theta_re;  // iid process effect per region
  Eigen::VectorXd gamma_re;  // iid reporting effect per observation
  double sigma = 0.5;        // sd of theta_re
  double nu = 0.5;           // ICAR scale
  double epsilon = 0.5;      // sd of gamma_re
  double dispersion = 1.0;   // NegBin dispersion; unused for Poisson

  static ParameterState initial(const ModelSpec& spec, const CountDataset& data);
};

// log lambda per observation: offset + alpha0 + X alpha[1:] (+ phi_s)
// (+ theta_s). Throws ConfigError on dimension mismatch.
Eigen::VectorXd linear_predictor_lambda(const ParameterState& state,
                                        const CountDataset& data,
                                        const ModelSpec& spec);

// Reporting probability per observation: 1 where the completeness flag is
// set, logistic(beta0 + W beta[1:] + gamma) otherwise.
Eigen::VectorXd reporting_probability(const ParameterState& state,
                                      const CountDataset& data,
                                      const ModelSpec& spec);

// Marginalized observation log-likelihood: z ~ Poisson(pi * lambda) or
// NegBin(pi * lambda, dispersion), the latent true count integrated out.
// Throws NumericalError if a linear predictor evaluates to NaN.
double marginal_log_likelihood(const ParameterState& state,
                               const CountDataset& data,
                               const ModelSpec& spec);

// Improper pairwise-difference ICAR log-density:
//   -(1/(2 nu^2)) sum_{s~s'} (phi_s - phi_s')^2 - rank * log(nu)
// with rank = n_regions - n_components. Requires phi to sum to zero within
// `tol` on every connected component.
double icar_log_density(const Eigen::VectorXd& phi, double nu,
                        const AdjacencyGraph& graph, double tol = 1e-8);

// Quadratic form sum_{s~s'} (phi_s - phi_s')^2 over unique neighbor pairs.
double icar_pairwise_sum(const Eigen::VectorXd& phi,
                         const AdjacencyGraph& graph);

// Joint log-prior of all active parameters (Normal coefficients,
// half-Normal scales, Normal random effects, ICAR phi). Full normalizing
// constants are kept for every proper density.
double log_prior(const ParameterState& state, const CountDataset& data,
                 const ModelSpec& spec);

double log_posterior(const ParameterState& state, const CountDataset& data,
                     const ModelSpec& spec);

// Count-family log-pmf at mean m (dispatches on spec.family).
double count_logpmf(const ModelSpec& spec, long long z, double mean,
                    double dispersion);

}  // namespace pogit
