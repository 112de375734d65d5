#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "pogit/data.hpp"
#include "pogit/graph.hpp"
#include "pogit/rng.hpp"

namespace pogit {

// Hidden generating values kept apart from the observed data so the
// fitting path can never touch them.
struct SimulationTruth {
  Eigen::VectorXi y;
  Eigen::VectorXd pi;
  Eigen::VectorXd log_lambda;
  Eigen::VectorXd phi;
  Eigen::VectorXd w;      // true reporting covariate (hidden when proxies used)
  Eigen::VectorXd gamma;  // reporting noise actually applied (may be zero)
  Eigen::VectorXd theta;  // unstructured process effect (usually zero)
};

struct SimulatedData {
  RawData observed;
  SimulationTruth truth;
};

struct SimulationConfig {
  int n_regions = 100;  // perfect square; laid out as a lattice
  double beta0 = 0.0;
  double beta1 = 2.0;
  double alpha0 = 4.0;
  double alpha1 = 1.0;
  double nu = 0.5;
  // sd of gamma_s in the generator; applied only when proxies are in play
  // (the reporting covariate then no longer captures pi fully).
  double reporting_noise_sd = 0.5;
  double process_noise_sd = 0.0;  // sd of an extra unstructured theta_s
  std::vector<double> proxy_rhos;  // proxies v1..vK; hides w when nonempty
  std::uint64_t seed = 1;
};

// Draws phi from the sum-to-zero Gaussian matched to the ICAR precision:
// independent N(0, nu^2/omega_j) weights on each non-null eigenvector of
// the graph Laplacian. Sums to zero per connected component. The class
// form factorizes the Laplacian once for repeated draws.
class IcarSampler {
 public:
  explicit IcarSampler(const AdjacencyGraph& graph);
  Eigen::VectorXd draw(double nu, Rng& rng) const;

 private:
  Eigen::MatrixXd vectors_;
  Eigen::VectorXd omega_;
  double tol_ = 0.0;
};

Eigen::VectorXd simulate_icar(const AdjacencyGraph& graph, double nu, Rng& rng);
Eigen::VectorXd simulate_icar(const AdjacencyGraph& graph, double nu,
                              std::uint64_t seed);

// v_k = rho_k w + sqrt(1-rho_k^2) e_k with e_k drawn from w's marginal law
// (Uniform(-1,1)), giving theoretical correlation rho_k.
Eigen::MatrixXd make_proxy_covariates(const Eigen::VectorXd& w,
                                      const std::vector<double>& rhos,
                                      Rng& rng);

// One spatial dataset from the generator
//   lambda = exp(alpha0 + alpha1 x + phi [+ theta]),  y ~ Poisson(lambda),
//   pi = logistic(beta0 + beta1 w [+ gamma]),         z ~ Binomial(pi, y).
// Observed covariates: "x" plus either "w" or proxies "v1".."vK".
SimulatedData simulate_dataset(const SimulationConfig& config);

// Synthetic dataset in the tuberculosis reporting schema: micro-regions x
// years with population offsets, social-deprivation process covariates and
// a treatment-timeliness reporting covariate.
struct TbSchemaConfig {
  int n_regions = 557;
  std::vector<int> years = {2012, 2013, 2014};
  double alpha0 = -8.0;
  double beta0 = 2.0;                // mean reporting rate ~ 88%
  double timeliness_slope = 1.5;     // logit-scale effect of timeliness
  double nu = 0.3;                   // ICAR scale
  double sigma = 0.15;               // unstructured process effect
  double epsilon = 0.3;              // reporting noise
  std::uint64_t seed = 1;
};
SimulatedData simulate_tb_schema(const TbSchemaConfig& config);

}  // namespace pogit
