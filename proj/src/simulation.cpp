#include "pogit/simulation.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "pogit/errors.hpp"
#include "pogit/math.hpp"

namespace pogit {

namespace {

Eigen::MatrixXd laplacian(const AdjacencyGraph& graph) {
  int n = graph.n_regions();
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < n; ++s) {
    lap(s, s) = static_cast<double>(graph.neighbors(s).size());
    for (int t : graph.neighbors(s)) lap(s, t) = -1.0;
  }
  return lap;
}

}  // namespace

IcarSampler::IcarSampler(const AdjacencyGraph& graph) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(laplacian(graph));
  if (eig.info() != Eigen::Success)
    throw NumericalError("icar simulation: eigendecomposition failed");
  vectors_ = eig.eigenvectors();
  omega_ = eig.eigenvalues();
  tol_ = 1e-8 * std::max(1.0, omega_[omega_.size() - 1]);
}

Eigen::VectorXd IcarSampler::draw(double nu, Rng& rng) const {
  const auto n = omega_.size();
  if (nu == 0.0) return Eigen::VectorXd::Zero(n);
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (omega_[j] <= tol_) continue;  // null space: one per component
    weights[j] = rng.normal(0.0, nu / std::sqrt(omega_[j]));
  }
  return vectors_ * weights;
}

Eigen::VectorXd simulate_icar(const AdjacencyGraph& graph, double nu,
                              Rng& rng) {
  if (nu == 0.0) return Eigen::VectorXd::Zero(graph.n_regions());
  return IcarSampler(graph).draw(nu, rng);
}

Eigen::VectorXd simulate_icar(const AdjacencyGraph& graph, double nu,
                              std::uint64_t seed) {
  Rng rng(seed);
  return simulate_icar(graph, nu, rng);
}

Eigen::MatrixXd make_proxy_covariates(const Eigen::VectorXd& w,
                                      const std::vector<double>& rhos,
                                      Rng& rng) {
  for (double rho : rhos) {
    if (rho < 0.0 || rho > 1.0)
      throw ConfigError("proxies: correlations must lie in [0,1]");
  }
  Eigen::MatrixXd v(w.size(), static_cast<Eigen::Index>(rhos.size()));
  for (std::size_t k = 0; k < rhos.size(); ++k) {
    double rho = rhos[k];
    double mix = std::sqrt(1.0 - rho * rho);
    for (Eigen::Index s = 0; s < w.size(); ++s) {
      double e = rng.uniform(-1.0, 1.0);
      v(s, static_cast<Eigen::Index>(k)) = rho * w[s] + mix * e;
    }
  }
  return v;
}

SimulatedData simulate_dataset(const SimulationConfig& config) {
  int side = static_cast<int>(std::lround(std::sqrt(config.n_regions)));
  if (side * side != config.n_regions) {
    throw ConfigError("simulation: n_regions=" +
                      std::to_string(config.n_regions) +
                      " is not a perfect square");
  }
  for (double rho : config.proxy_rhos) {
    if (rho < 0.0 || rho > 1.0)
      throw ConfigError("simulation: proxy correlations must lie in [0,1]");
  }
  const int n = config.n_regions;
  Rng rng(Rng::splitmix64(config.seed));
  AdjacencyGraph graph = AdjacencyGraph::lattice(side);

  Eigen::VectorXd x(n), w(n);
  for (int s = 0; s < n; ++s) x[s] = rng.uniform(-1.0, 1.0);
  for (int s = 0; s < n; ++s) w[s] = rng.uniform(-1.0, 1.0);
  Eigen::VectorXd phi = simulate_icar(graph, config.nu, rng);

  SimulationTruth truth;
  truth.phi = phi;
  truth.w = w;
  truth.gamma = Eigen::VectorXd::Zero(n);
  truth.theta = Eigen::VectorXd::Zero(n);
  if (!config.proxy_rhos.empty() && config.reporting_noise_sd > 0.0) {
    for (int s = 0; s < n; ++s)
      truth.gamma[s] = rng.normal(0.0, config.reporting_noise_sd);
  }
  if (config.process_noise_sd > 0.0) {
    for (int s = 0; s < n; ++s)
      truth.theta[s] = rng.normal(0.0, config.process_noise_sd);
  }

  truth.log_lambda.resize(n);
  truth.pi.resize(n);
  truth.y.resize(n);
  Eigen::VectorXi z(n);
  for (int s = 0; s < n; ++s) {
    truth.log_lambda[s] =
        config.alpha0 + config.alpha1 * x[s] + phi[s] + truth.theta[s];
    truth.pi[s] =
        logistic(config.beta0 + config.beta1 * w[s] + truth.gamma[s]);
    truth.y[s] = static_cast<int>(rng.poisson(std::exp(truth.log_lambda[s])));
    z[s] = static_cast<int>(rng.binomial(truth.y[s], truth.pi[s]));
  }

  RawData observed;
  observed.z = z;
  observed.units.region.resize(n);
  observed.units.time.assign(n, 0);
  observed.units.group.assign(n, 0);
  for (int s = 0; s < n; ++s) observed.units.region[s] = s;
  observed.offset = Eigen::VectorXd::Zero(n);
  observed.complete.assign(n, 0);
  observed.graph = graph;
  observed.covariates["x"] = x;
  if (config.proxy_rhos.empty()) {
    observed.covariates["w"] = w;
  } else {
    Eigen::MatrixXd v = make_proxy_covariates(w, config.proxy_rhos, rng);
    for (std::size_t k = 0; k < config.proxy_rhos.size(); ++k) {
      observed.covariates["v" + std::to_string(k + 1)] =
          v.col(static_cast<Eigen::Index>(k));
    }
  }
  return {std::move(observed), std::move(truth)};
}

SimulatedData simulate_tb_schema(const TbSchemaConfig& config) {
  const int n_regions = config.n_regions;
  const int n_years = static_cast<int>(config.years.size());
  const int n = n_regions * n_years;
  if (n_regions < 2 || n_years < 1)
    throw ConfigError("tb schema: need >= 2 regions and >= 1 year");
  Rng rng(Rng::splitmix64(config.seed ^ 0x7b5ULL));

  // Connected planar-ish adjacency: a square lattice truncated to
  // n_regions nodes.
  int side = static_cast<int>(std::ceil(std::sqrt(n_regions)));
  std::vector<std::vector<int>> nb(n_regions);
  auto id = [side](int r, int c) { return r * side + c; };
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      int u = id(r, c);
      if (u >= n_regions) continue;
      auto link = [&](int v) {
        if (v < n_regions) {
          nb[u].push_back(v);
          nb[v].push_back(u);
        }
      };
      if (c + 1 < side) link(id(r, c + 1));
      if (r + 1 < side) link(id(r + 1, c));
    }
  }
  AdjacencyGraph graph{std::move(nb)};

  // Region-level covariates on plausible scales.
  Eigen::VectorXd population(n_regions), unemployment(n_regions),
      urbanisation(n_regions), density(n_regions), indigenous(n_regions),
      timeliness(n_regions);
  for (int s = 0; s < n_regions; ++s) {
    population[s] = std::exp(rng.normal(11.3, 0.6));
    unemployment[s] = std::clamp(0.10 + 0.04 * rng.normal(), 0.02, 0.25);
    urbanisation[s] = std::clamp(0.65 + 0.15 * rng.normal(), 0.25, 0.98);
    density[s] = std::clamp(0.9 + 0.2 * rng.normal(), 0.4, 1.6);
    indigenous[s] = std::clamp(0.08 + 0.05 * rng.normal(), 0.0, 0.3);
    timeliness[s] = std::clamp(0.5 + 0.2 * rng.normal(), 0.05, 0.95);
  }
  Eigen::VectorXd phi = simulate_icar(graph, config.nu, rng);
  Eigen::VectorXd theta(n_regions);
  for (int s = 0; s < n_regions; ++s)
    theta[s] = rng.normal(0.0, config.sigma);

  auto centered = [](const Eigen::VectorXd& v) {
    return (v.array() - v.mean()).matrix().eval();
  };
  Eigen::VectorXd une_c = centered(unemployment), urb_c = centered(urbanisation),
                  den_c = centered(density), ind_c = centered(indigenous),
                  tim_c = centered(timeliness);

  SimulationTruth truth;
  truth.y.resize(n);
  truth.pi.resize(n);
  truth.log_lambda.resize(n);
  truth.phi = phi;
  truth.theta = theta;
  truth.w = timeliness;
  truth.gamma.resize(n);

  RawData observed;
  observed.z.resize(n);
  observed.units.region.resize(n);
  observed.units.time.resize(n);
  observed.units.group.assign(n, 0);
  observed.offset.resize(n);
  observed.complete.assign(n, 0);
  observed.graph = graph;

  Eigen::VectorXd une_obs(n), urb_obs(n), den_obs(n), ind_obs(n), tim_obs(n),
      pop_obs(n);
  int i = 0;
  for (int t = 0; t < n_years; ++t) {
    for (int s = 0; s < n_regions; ++s, ++i) {
      double log_lam = std::log(population[s]) + config.alpha0 +
                       3.0 * une_c[s] + 1.2 * urb_c[s] + 0.8 * den_c[s] -
                       0.5 * den_c[s] * den_c[s] + 2.0 * ind_c[s] + phi[s] +
                       theta[s];
      truth.gamma[i] = rng.normal(0.0, config.epsilon);
      double eta = config.beta0 + config.timeliness_slope * tim_c[s] +
                   truth.gamma[i];
      truth.log_lambda[i] = log_lam;
      truth.pi[i] = logistic(eta);
      truth.y[i] = static_cast<int>(rng.poisson(std::exp(log_lam)));
      observed.z[i] = static_cast<int>(rng.binomial(truth.y[i], truth.pi[i]));
      observed.units.region[i] = s;
      observed.units.time[i] = config.years[t];
      observed.offset[i] = std::log(population[s]);
      pop_obs[i] = population[s];
      une_obs[i] = unemployment[s];
      urb_obs[i] = urbanisation[s];
      den_obs[i] = density[s];
      ind_obs[i] = indigenous[s];
      tim_obs[i] = timeliness[s];
    }
  }
  observed.covariates["population"] = pop_obs;
  observed.covariates["unemployment"] = une_obs;
  observed.covariates["urbanisation"] = urb_obs;
  observed.covariates["density"] = den_obs;
  observed.covariates["indigenous"] = ind_obs;
  observed.covariates["timeliness"] = tim_obs;
  return {std::move(observed), std::move(truth)};
}

}  // namespace pogit
