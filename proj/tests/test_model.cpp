#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <numeric>

#include "pogit/errors.hpp"
#include "pogit/math.hpp"
#include "pogit/model.hpp"
#include "pogit/rng.hpp"
#include "test_util.hpp"

using namespace pogit;
using namespace testutil;

namespace {

ModelSpec plain_spec() {
  ModelSpec spec;
  spec.family = Family::kPoisson;
  return spec;
}

}  // namespace

TEST_CASE("linear predictor: zero coefficients give log lambda 0") {
  Eigen::VectorXi z = Eigen::VectorXi::Zero(4);
  auto data = manual_dataset(z, Eigen::MatrixXd::Random(4, 2),
                             Eigen::MatrixXd(4, 0), Eigen::VectorXd::Zero(4),
                             {0, 0, 0, 0});
  ModelSpec spec = plain_spec();
  ParameterState state = ParameterState::initial(spec, data);
  Eigen::VectorXd ll = linear_predictor_lambda(state, data, spec);
  CHECK(ll.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("linear predictor: alpha0=4, alpha1=1, x=0.5 gives 4.5") {
  Eigen::VectorXi z(1);
  z << 0;
  Eigen::MatrixXd X(1, 1);
  X << 0.5;
  auto data = manual_dataset(z, X, Eigen::MatrixXd(1, 0),
                             Eigen::VectorXd::Zero(1), {0});
  ModelSpec spec = plain_spec();
  ParameterState state = ParameterState::initial(spec, data);
  state.alpha << 4.0, 1.0;
  CHECK(linear_predictor_lambda(state, data, spec)[0] ==
        doctest::Approx(4.5).epsilon(1e-14));
}

TEST_CASE("linear predictor: offset and random effects add up") {
  Eigen::VectorXi z(1);
  z << 0;
  Eigen::VectorXd offset(1);
  offset << std::log(100.0);
  auto data = manual_dataset(z, Eigen::MatrixXd(1, 0), Eigen::MatrixXd(1, 0),
                             offset, {0});
  ModelSpec spec = plain_spec();
  spec.include_icar = true;
  spec.include_iid_process = true;
  ParameterState state = ParameterState::initial(spec, data);
  state.alpha << 1.0;
  state.phi << 0.2;
  state.theta_re << -0.1;
  double expected = 1.0 + std::log(100.0) + 0.2 - 0.1;  // independent re-sum
  CHECK(linear_predictor_lambda(state, data, spec)[0] ==
        doctest::Approx(expected).epsilon(1e-12));

  state.alpha = Eigen::VectorXd::Zero(2);  // wrong length
  CHECK_THROWS_AS(linear_predictor_lambda(state, data, spec), ConfigError);
}

TEST_CASE("reporting probability: completeness, logistic(0), logistic(1.5)") {
  Eigen::VectorXi z(3);
  z << 0, 0, 0;
  Eigen::MatrixXd W(3, 1);
  W << 0.4, 0.0, 0.75;
  auto data = manual_dataset(z, Eigen::MatrixXd(3, 0), W,
                             Eigen::VectorXd::Zero(3), {1, 0, 0});
  ModelSpec spec = plain_spec();
  ParameterState state = ParameterState::initial(spec, data);
  state.beta << 0.0, 2.0;
  Eigen::VectorXd pi = reporting_probability(state, data, spec);
  CHECK(pi[0] == 1.0);  // complete, any eta
  CHECK(pi[1] == doctest::Approx(0.5).epsilon(1e-14));
  double direct = 1.0 / (1.0 + std::exp(-1.5));
  CHECK(pi[2] == doctest::Approx(direct).epsilon(1e-12));
  CHECK(pi[2] > 0.0);
  CHECK(pi[2] < 1.0);
}

TEST_CASE("marginal likelihood equals plain Poisson when pi = 1") {
  Rng rng(21);
  const int n = 12;
  Eigen::VectorXi z(n);
  for (int i = 0; i < n; ++i) z[i] = static_cast<int>(rng.poisson(7.0));
  auto data = manual_dataset(z, Eigen::MatrixXd(n, 0), Eigen::MatrixXd(n, 0),
                             Eigen::VectorXd::Zero(n),
                             std::vector<std::uint8_t>(n, 1));
  ModelSpec spec = plain_spec();
  ParameterState state = ParameterState::initial(spec, data);
  state.alpha << std::log(7.0);
  double expected = 0.0;
  for (int i = 0; i < n; ++i) expected += poisson_logpmf(z[i], 7.0);
  CHECK(marginal_log_likelihood(state, data, spec) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("marginalized pmf agrees with the truncated-sum oracle") {
  // lambda=10, pi=0.5, z=4; the oracle sums the joint over latent y.
  double oracle = compound_poisson_logpmf_oracle(4, 10.0, 0.5, 200);
  double direct = poisson_logpmf(4, 5.0);
  CHECK(std::fabs(direct - oracle) < 1e-10);
  CHECK(direct == doctest::Approx(-1.740302).epsilon(1e-5));

  Eigen::VectorXi z(1);
  z << 4;
  auto data = manual_dataset(z, Eigen::MatrixXd(1, 0), Eigen::MatrixXd(1, 0),
                             Eigen::VectorXd::Zero(1), {0});
  ModelSpec spec = plain_spec();
  ParameterState state = ParameterState::initial(spec, data);
  state.alpha << std::log(10.0);
  state.beta << 0.0;  // logistic(0) = 0.5
  CHECK(marginal_log_likelihood(state, data, spec) ==
        doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("NegBin likelihood approaches Poisson as dispersion grows") {
  Eigen::VectorXi z(1);
  z << 4;
  auto data = manual_dataset(z, Eigen::MatrixXd(1, 0), Eigen::MatrixXd(1, 0),
                             Eigen::VectorXd::Zero(1), {0});
  ModelSpec spec = plain_spec();
  spec.family = Family::kNegBinomial;
  ParameterState state = ParameterState::initial(spec, data);
  state.alpha << std::log(10.0);
  state.beta << 0.0;
  state.dispersion = 1e8;
  double poisson_value = poisson_logpmf(4, 5.0);
  CHECK(std::fabs(marginal_log_likelihood(state, data, spec) - poisson_value) <
        1e-4);
}

TEST_CASE("likelihood with all counts complete ignores beta") {
  Rng rng(33);
  const int n = 10;
  Eigen::VectorXi z(n);
  for (int i = 0; i < n; ++i) z[i] = static_cast<int>(rng.poisson(4.0));
  Eigen::MatrixXd W = Eigen::MatrixXd::Random(n, 2);
  auto data = manual_dataset(z, Eigen::MatrixXd(n, 0), W,
                             Eigen::VectorXd::Zero(n),
                             std::vector<std::uint8_t>(n, 1));
  ModelSpec spec = plain_spec();
  ParameterState state = ParameterState::initial(spec, data);
  state.alpha << 1.5;
  state.beta << 0.3, -2.0, 5.0;
  double a = marginal_log_likelihood(state, data, spec);
  state.beta << -4.0, 1.0, 0.2;
  double b = marginal_log_likelihood(state, data, spec);
  CHECK(a == b);
}

TEST_CASE("ICAR density: constant field, single pair, translation") {
  SUBCASE("constant zero field") {
    auto graph = AdjacencyGraph::lattice(4);
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(16);
    double nu = 2.0;
    CHECK(icar_log_density(phi, nu, graph) ==
          doctest::Approx(-graph.icar_rank() * std::log(nu)).epsilon(1e-12));
  }
  SUBCASE("two connected nodes") {
    auto graph = edge_graph(2, {{0, 1}});
    Eigen::VectorXd phi(2);
    phi << 1.0, -1.0;
    // single pair: -(1/2) (1 - (-1))^2 - rank log 1 = -2
    CHECK(icar_log_density(phi, 1.0, graph) ==
          doctest::Approx(-2.0).epsilon(1e-12));
  }
  SUBCASE("adding a constant then re-centering leaves density unchanged") {
    auto graph = AdjacencyGraph::lattice(10);
    Rng rng(9);
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(100);
    for (int s = 0; s < 100; ++s) phi[s] = rng.normal();
    phi.array() -= phi.mean();
    double base = icar_log_density(phi, 0.7, graph);
    Eigen::VectorXd shifted = phi.array() + 5.0;
    shifted.array() -= shifted.mean();
    CHECK(icar_log_density(shifted, 0.7, graph) ==
          doctest::Approx(base).epsilon(1e-10));
  }
  SUBCASE("violated sum-to-zero is rejected") {
    auto graph = edge_graph(2, {{0, 1}});
    Eigen::VectorXd phi(2);
    phi << 1.0, 1.0;
    CHECK_THROWS_AS(icar_log_density(phi, 1.0, graph), ConfigError);
  }
}

TEST_CASE("ICAR density invariant to relabeling and neighbor order") {
  Rng rng(17);
  auto graph = edge_graph(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0},
                              {1, 4}});
  Eigen::VectorXd phi(6);
  for (int s = 0; s < 6; ++s) phi[s] = rng.normal();
  phi.array() -= phi.mean();
  double base = icar_log_density(phi, 0.8, graph);

  // Relabel nodes with the permutation (0..5) -> (3,5,0,1,4,2).
  std::vector<int> perm = {3, 5, 0, 1, 4, 2};
  std::vector<std::vector<int>> nb(6);
  for (int s = 0; s < 6; ++s) {
    for (int t : graph.neighbors(s)) nb[perm[s]].push_back(perm[t]);
  }
  // Scramble neighbor list order too.
  for (auto& lst : nb) std::reverse(lst.begin(), lst.end());
  AdjacencyGraph relabeled{std::move(nb)};
  Eigen::VectorXd phi_rel(6);
  for (int s = 0; s < 6; ++s) phi_rel[perm[s]] = phi[s];
  CHECK(icar_log_density(phi_rel, 0.8, relabeled) ==
        doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("log prior: mode pull, boundary, scale algebra") {
  const int n = 8;
  Eigen::VectorXi z = Eigen::VectorXi::Zero(n);
  auto data = manual_dataset(z, Eigen::MatrixXd(n, 0), Eigen::MatrixXd(n, 0),
                             Eigen::VectorXd::Zero(n),
                             std::vector<std::uint8_t>(n, 0));
  ModelSpec spec = plain_spec();
  spec.include_iid_reporting = true;
  spec.priors.beta0_mean = 1.0;
  spec.priors.beta0_sd = 0.5;

  ParameterState state = ParameterState::initial(spec, data);
  double at_mean = log_prior(state, data, spec);
  CHECK(std::isfinite(at_mean));
  state.beta[0] = 0.2;  // away from the prior mean
  CHECK(log_prior(state, data, spec) < at_mean);
  state.beta[0] = 1.0;

  SUBCASE("sigma at zero is outside the half-Normal support") {
    ModelSpec spec2 = plain_spec();
    spec2.include_iid_process = true;
    ParameterState s2 = ParameterState::initial(spec2, data);
    s2.sigma = 0.0;
    CHECK(log_prior(s2, data, spec2) == kNegInf);
  }

  SUBCASE("doubling epsilon with gamma=0 shifts by -n log 2 plus its own prior") {
    double eps = 0.4;
    state.epsilon = eps;
    double lp1 = log_prior(state, data, spec);
    state.epsilon = 2.0 * eps;
    double lp2 = log_prior(state, data, spec);
    double own_prior_change = halfnormal_logpdf(2.0 * eps, 1.0) -
                              halfnormal_logpdf(eps, 1.0);
    CHECK(lp2 - lp1 - own_prior_change ==
          doctest::Approx(-n * std::log(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("log posterior is the sum of prior and likelihood") {
  Rng rng(4);
  const int n = 6;
  Eigen::VectorXi z(n);
  for (int i = 0; i < n; ++i) z[i] = static_cast<int>(rng.poisson(3.0));
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(n, 1);
  auto data = manual_dataset(z, X, Eigen::MatrixXd(n, 0),
                             Eigen::VectorXd::Zero(n),
                             std::vector<std::uint8_t>(n, 0));
  ModelSpec spec = plain_spec();
  ParameterState state = ParameterState::initial(spec, data);
  state.alpha << 1.0, 0.3;
  CHECK(log_posterior(state, data, spec) ==
        doctest::Approx(log_prior(state, data, spec) +
                        marginal_log_likelihood(state, data, spec))
            .epsilon(1e-12));
}

TEST_CASE("log posterior ordered by beta0 prior when likelihood ignores it") {
  const int n = 5;
  Eigen::VectorXi z = Eigen::VectorXi::Constant(n, 3);
  auto data = manual_dataset(z, Eigen::MatrixXd(n, 0), Eigen::MatrixXd(n, 0),
                             Eigen::VectorXd::Zero(n),
                             std::vector<std::uint8_t>(n, 1));  // c = 1
  ModelSpec spec = plain_spec();
  spec.priors.beta0_mean = 0.0;
  spec.priors.beta0_sd = 1.0;
  ParameterState near = ParameterState::initial(spec, data);
  ParameterState far = near;
  near.beta[0] = 0.1;
  far.beta[0] = 2.5;
  CHECK(marginal_log_likelihood(near, data, spec) ==
        marginal_log_likelihood(far, data, spec));
  CHECK(log_posterior(near, data, spec) > log_posterior(far, data, spec));
}

TEST_CASE("thinned-Poisson compound identity (reduced grid)") {
  // The full 9-cell grid at 1e5 draws is the first acceptance criterion;
  // this keeps a faster version in the unit suite.
  Rng rng(101);
  for (double lambda : {1.0, 10.0}) {
    for (double pi : {0.1, 0.5, 0.9}) {
      std::vector<long long> thinned(50000);
      for (auto& v : thinned) {
        long long y = rng.poisson(lambda);
        v = rng.binomial(y, pi);
      }
      double tv = tv_vs_exact(
          thinned, [&](long long k) { return poisson_logpmf(k, pi * lambda); });
      CAPTURE(lambda);
      CAPTURE(pi);
      CHECK(tv < 0.015);  // 5e4 draws; the acceptance run uses 1e5 and 0.01
    }
  }
}

TEST_CASE("NegBin compound identity via quantile-binned TV") {
  Rng rng(202);
  for (double disp : {0.5, 5.0}) {
    for (double lambda : {1.0, 10.0, 100.0}) {
      for (double pi : {0.1, 0.5, 0.9}) {
        std::vector<long long> thinned(100000);
        for (auto& v : thinned) {
          long long y = rng.negbin(lambda, disp);
          v = rng.binomial(y, pi);
        }
        double mean = pi * lambda;
        double sd = std::sqrt(mean + mean * mean / disp);
        auto k_max = static_cast<long long>(mean + 40.0 * sd + 20.0);
        double tv = binned_tv_vs_exact(
            thinned,
            [&](long long k) { return negbin_logpmf(k, mean, disp); }, k_max);
        CAPTURE(disp);
        CAPTURE(lambda);
        CAPTURE(pi);
        CHECK(tv < 0.01);
      }
    }
  }
}
