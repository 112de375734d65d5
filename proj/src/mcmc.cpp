#include "pogit/mcmc.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "pogit/afss.hpp"
#include "pogit/csv.hpp"
#include "pogit/digest.hpp"
#include "pogit/errors.hpp"
#include "pogit/math.hpp"
#include "pogit/rng.hpp"

namespace pogit {

void ChainConfig::validate() const {
  if (n_chains < 1) throw ConfigError("chains: n_chains must be >= 1");
  if (thin < 1) throw ConfigError("chains: thin must be >= 1");
  if (n_burnin < 0 || n_burnin >= n_iterations)
    throw ConfigError("chains: need n_burnin < n_iterations");
  if (adaptation_interval < 1)
    throw ConfigError("chains: adaptation_interval must be >= 1");
}

ParamLayout ParamLayout::build(const ModelSpec& spec,
                               const CountDataset& data) {
  ParamLayout lay;
  lay.n_alpha = 1 + static_cast<int>(data.X.cols());
  lay.n_beta = 1 + static_cast<int>(data.W.cols());
  int off = lay.n_alpha + lay.n_beta;
  if (spec.include_icar) {
    lay.phi_off = off;
    lay.n_phi = data.n_regions();
    off += lay.n_phi;
  }
  if (spec.include_iid_process) {
    lay.theta_off = off;
    lay.n_theta = data.n_regions();
    off += lay.n_theta;
  }
  if (spec.include_iid_reporting) {
    lay.gamma_off = off;
    lay.n_gamma = data.n_obs();
    off += lay.n_gamma;
  }
  if (spec.include_iid_process) lay.sigma_idx = off++;
  if (spec.include_icar) lay.nu_idx = off++;
  if (spec.include_iid_reporting) lay.epsilon_idx = off++;
  if (spec.family == Family::kNegBinomial) lay.dispersion_idx = off++;
  lay.total = off;
  return lay;
}

std::vector<std::string> ParamLayout::names() const {
  std::vector<std::string> out;
  out.reserve(total);
  for (int k = 0; k < n_alpha; ++k)
    out.push_back("alpha[" + std::to_string(k) + "]");
  for (int j = 0; j < n_beta; ++j)
    out.push_back("beta[" + std::to_string(j) + "]");
  for (int s = 0; s < n_phi; ++s)
    out.push_back("phi[" + std::to_string(s) + "]");
  for (int s = 0; s < n_theta; ++s)
    out.push_back("theta[" + std::to_string(s) + "]");
  for (int i = 0; i < n_gamma; ++i)
    out.push_back("gamma[" + std::to_string(i) + "]");
  if (sigma_idx >= 0) out.push_back("sigma");
  if (nu_idx >= 0) out.push_back("nu");
  if (epsilon_idx >= 0) out.push_back("epsilon");
  if (dispersion_idx >= 0) out.push_back("dispersion");
  return out;
}

ParameterState ParamLayout::unpack(const Eigen::VectorXd& row) const {
  ParameterState s;
  s.alpha = row.segment(0, n_alpha);
  s.beta = row.segment(n_alpha, n_beta);
  if (phi_off >= 0) s.phi = row.segment(phi_off, n_phi);
  if (theta_off >= 0) s.theta_re = row.segment(theta_off, n_theta);
  if (gamma_off >= 0) s.gamma_re = row.segment(gamma_off, n_gamma);
  if (sigma_idx >= 0) s.sigma = row[sigma_idx];
  if (nu_idx >= 0) s.nu = row[nu_idx];
  if (epsilon_idx >= 0) s.epsilon = row[epsilon_idx];
  if (dispersion_idx >= 0) s.dispersion = row[dispersion_idx];
  return s;
}

void ParamLayout::pack(const ParameterState& state, Eigen::VectorXd& row) const {
  row.segment(0, n_alpha) = state.alpha;
  row.segment(n_alpha, n_beta) = state.beta;
  if (phi_off >= 0) row.segment(phi_off, n_phi) = state.phi;
  if (theta_off >= 0) row.segment(theta_off, n_theta) = state.theta_re;
  if (gamma_off >= 0) row.segment(gamma_off, n_gamma) = state.gamma_re;
  if (sigma_idx >= 0) row[sigma_idx] = state.sigma;
  if (nu_idx >= 0) row[nu_idx] = state.nu;
  if (epsilon_idx >= 0) row[epsilon_idx] = state.epsilon;
  if (dispersion_idx >= 0) row[dispersion_idx] = state.dispersion;
}

int PosteriorSamples::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<Eigen::VectorXd> PosteriorSamples::parameter(int idx) const {
  std::vector<Eigen::VectorXd> out;
  out.reserve(chains.size());
  for (const auto& c : chains) out.push_back(c.col(idx));
  return out;
}

std::string spec_fingerprint(const ModelSpec& spec, const CountDataset& data) {
  std::ostringstream ss;
  ss << (spec.family == Family::kPoisson ? "poisson" : "negbin");
  for (const auto& t : spec.process_terms) ss << "|p:" << t.name << ":" << t.degree;
  for (const auto& t : spec.reporting_terms) ss << "|r:" << t.name << ":" << t.degree;
  ss << "|icar:" << spec.include_icar << "|iidp:" << spec.include_iid_process
     << "|iidr:" << spec.include_iid_reporting;
  const PriorSpec& p = spec.priors;
  ss << "|" << p.alpha0_mean << "," << p.alpha0_sd << "," << p.beta0_mean << ","
     << p.beta0_sd << "," << p.coef_sd << "," << p.halfnormal_scale << ","
     << p.dispersion_scale;
  ss << "|n:" << data.n_obs() << "|r:" << data.n_regions()
     << "|x:" << data.X.cols() << "|w:" << data.W.cols();
  return hex64(fnv1a64(ss.str()));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Directional target for the joint (alpha, beta) block. Evaluations along
// a factor direction reduce to one exp/log pair per observation because
// the direction is pre-projected onto the design columns.
class CoefficientTarget final : public DirectionalTarget {
 public:
  CoefficientTarget(const CountDataset& data, const ModelSpec& spec)
      : data_(data), spec_(spec), n_(data.n_obs()) {}

  // Current cached predictors, maintained by the chain runner.
  Eigen::VectorXd log_lam;  // full log lambda including effects
  Eigen::VectorXd eta;      // full reporting predictor including gamma
  double dispersion = 1.0;

  std::function<double(double)> along(const Eigen::VectorXd& base,
                                      const Eigen::VectorXd& dir) override {
    const int na = 1 + static_cast<int>(data_.X.cols());
    proj_x_ = Eigen::VectorXd::Constant(n_, dir[0]);
    if (data_.X.cols() > 0)
      proj_x_ += data_.X * dir.segment(1, data_.X.cols());
    proj_w_ = Eigen::VectorXd::Constant(n_, dir[na]);
    if (data_.W.cols() > 0)
      proj_w_ += data_.W * dir.segment(na + 1, data_.W.cols());

    return [this, base, dir](double t) {
      double lp = coef_log_prior(base + t * dir);
      if (lp == kNegInf) return kNegInf;
      double ll = 0.0;
      for (int i = 0; i < n_; ++i) {
        double pi = data_.complete[i]
                        ? 1.0
                        : logistic(eta[i] + t * proj_w_[i]);
        double mean = pi * std::exp(log_lam[i] + t * proj_x_[i]);
        ll += count_logpmf(spec_, data_.z[i], mean, dispersion);
        if (ll == kNegInf) return kNegInf;
      }
      return lp + ll;
    };
  }

  void commit(double t) override {
    if (t == 0.0) return;
    log_lam += t * proj_x_;
    eta += t * proj_w_;
  }

 private:
  double coef_log_prior(const Eigen::VectorXd& coef) const {
    const PriorSpec& p = spec_.priors;
    const int na = 1 + static_cast<int>(data_.X.cols());
    double lp = normal_logpdf(coef[0], p.alpha0_mean, p.alpha0_sd) +
                normal_logpdf(coef[na], p.beta0_mean, p.beta0_sd);
    for (int k = 1; k < na; ++k) lp += normal_logpdf(coef[k], 0.0, p.coef_sd);
    for (int j = na + 1; j < coef.size(); ++j)
      lp += normal_logpdf(coef[j], 0.0, p.coef_sd);
    return lp;
  }

  const CountDataset& data_;
  const ModelSpec& spec_;
  int n_;
  Eigen::VectorXd proj_x_, proj_w_;
};

// Shared-width scalar slice group with burn-in adaptation toward the
// observed move scale.
struct WidthGroup {
  double width = 1.0;
  double sum_abs = 0.0;
  long long count = 0;

  void observe(double move) {
    sum_abs += std::fabs(move);
    ++count;
  }
  void refresh() {
    if (count > 0 && sum_abs > 0.0) {
      width = std::clamp(2.5 * sum_abs / static_cast<double>(count), 1e-4, 1e3);
    }
    sum_abs = 0.0;
    count = 0;
  }
};

struct ChainResult {
  Eigen::MatrixXd draws;
  ChainDiagnostics diag;
};

class ChainRunner {
 public:
  ChainRunner(const CountDataset& data, const ModelSpec& spec,
              const ChainConfig& config, int chain_index)
      : data_(data),
        spec_(spec),
        config_(config),
        layout_(ParamLayout::build(spec, data)),
        rng_(Rng::stream(config.seed, static_cast<std::uint64_t>(chain_index))),
        coef_target_(data, spec),
        obs_by_region_(data.obs_by_region()),
        afss_(layout_.n_alpha + layout_.n_beta,
              AfssOptions{1.0, 2.5, config.adaptation_interval, 20, config.slice}) {
    state_ = ParameterState::initial(spec, data);
    chain_seed_ = Rng::splitmix64(config.seed +
                                  0x9E3779B97F4A7C15ULL *
                                      (static_cast<std::uint64_t>(chain_index) + 1));
  }

  ChainResult run() {
    check_initial_posterior();
    const int n_keep = config_.n_retained();
    ChainResult result;
    result.draws.resize(n_keep, layout_.total);
    result.diag.chain_seed = chain_seed_;

    coef_ = Eigen::VectorXd(layout_.n_alpha + layout_.n_beta);
    coef_.head(layout_.n_alpha) = state_.alpha;
    coef_.tail(layout_.n_beta) = state_.beta;

    int kept = 0;
    for (int iter = 0; iter < config_.n_iterations; ++iter) {
      const bool adapting = iter < config_.n_burnin;
      if (!adapting && !afss_.frozen()) afss_.freeze();
      sweep(adapting);
      if (adapting) {
        afss_.adapt(coef_);
        if ((iter + 1) % config_.adaptation_interval == 0) refresh_widths();
      }
      if (iter >= config_.n_burnin && (iter - config_.n_burnin) % config_.thin == 0) {
        Eigen::VectorXd row(layout_.total);
        layout_.pack(state_, row);
        result.draws.row(kept++) = row;
        if (config_.kernel_trace)
          result.diag.kernel_trace.push_back(kernel_fingerprint());
      }
    }
    result.diag.afss = afss_.stats();
    result.diag.scalar = scalar_stats_;
    return result;
  }

 private:
  void check_initial_posterior() {
    double lp = log_posterior(state_, data_, spec_);
    if (!std::isfinite(lp)) {
      std::ostringstream ss;
      ss << "chain init: non-finite log-posterior (log_prior="
         << log_prior(state_, data_, spec_)
         << ", log_lik=" << marginal_log_likelihood(state_, data_, spec_)
         << ", alpha0=" << state_.alpha[0] << ", beta0=" << state_.beta[0]
         << ")";
      throw NumericalError(ss.str());
    }
  }

  void refresh_caches() {
    coef_target_.log_lam = data_.offset.array() + state_.alpha[0];
    if (data_.X.cols() > 0)
      coef_target_.log_lam += data_.X * state_.alpha.tail(data_.X.cols());
    for (int i = 0; i < data_.n_obs(); ++i) {
      int s = data_.units.region[i];
      if (spec_.include_icar) coef_target_.log_lam[i] += state_.phi[s];
      if (spec_.include_iid_process)
        coef_target_.log_lam[i] += state_.theta_re[s];
    }
    coef_target_.eta = Eigen::VectorXd::Constant(data_.n_obs(), state_.beta[0]);
    if (data_.W.cols() > 0)
      coef_target_.eta += data_.W * state_.beta.tail(data_.W.cols());
    if (spec_.include_iid_reporting) coef_target_.eta += state_.gamma_re;
    coef_target_.dispersion = state_.dispersion;
  }

  double obs_loglik_at(int i, double log_lam_i, double eta_i) const {
    double pi = data_.complete[i] ? 1.0 : logistic(eta_i);
    return count_logpmf(spec_, data_.z[i], pi * std::exp(log_lam_i),
                        state_.dispersion);
  }

  void sweep(bool adapting) {
    refresh_caches();

    // Joint coefficient block along adapted factor directions.
    afss_.sweep(coef_, coef_target_, rng_);
    state_.alpha = coef_.head(layout_.n_alpha);
    state_.beta = coef_.tail(layout_.n_beta);

    if (spec_.include_icar) {
      update_phi(adapting);
      recenter_phi();
    }
    if (spec_.include_iid_process) update_theta(adapting);
    if (spec_.include_iid_reporting) update_gamma(adapting);
    update_scales(adapting);
  }

  void update_phi(bool adapting) {
    auto& log_lam = coef_target_.log_lam;
    const double inv2nu2 = 1.0 / (2.0 * state_.nu * state_.nu);
    for (int s = 0; s < data_.n_regions(); ++s) {
      const double old = state_.phi[s];
      const auto& obs = obs_by_region_[s];
      auto conditional = [&](double v) {
        double lp = 0.0;
        for (int t : data_.graph.neighbors(s)) {
          double d = v - state_.phi[t];
          lp -= d * d * inv2nu2;
        }
        for (int i : obs)
          lp += obs_loglik_at(i, log_lam[i] - old + v, coef_target_.eta[i]);
        return lp;
      };
      double v = slice_update_scalar(old, conditional, w_phi_.width, -kInf,
                                     kInf, rng_, config_.slice, &scalar_stats_);
      if (adapting) w_phi_.observe(v - old);
      if (v != old) {
        state_.phi[s] = v;
        for (int i : obs) log_lam[i] += v - old;
      }
    }
  }

  // Per-component sum-to-zero projection; the subtracted offset is folded
  // into alpha0 so the likelihood is untouched on a connected graph.
  void recenter_phi() {
    const auto& graph = data_.graph;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(graph.n_components());
    Eigen::VectorXi count = Eigen::VectorXi::Zero(graph.n_components());
    for (int s = 0; s < graph.n_regions(); ++s) {
      mean[graph.component(s)] += state_.phi[s];
      count[graph.component(s)] += 1;
    }
    for (int g = 0; g < graph.n_components(); ++g) mean[g] /= count[g];
    double absorbed = 0.0;
    for (int i = 0; i < data_.n_obs(); ++i)
      absorbed += mean[graph.component(data_.units.region[i])];
    absorbed /= data_.n_obs();
    for (int s = 0; s < graph.n_regions(); ++s)
      state_.phi[s] -= mean[graph.component(s)];
    state_.alpha[0] += absorbed;
    coef_[0] += absorbed;
    for (int i = 0; i < data_.n_obs(); ++i) {
      coef_target_.log_lam[i] +=
          absorbed - mean[graph.component(data_.units.region[i])];
    }
  }

  void update_theta(bool adapting) {
    auto& log_lam = coef_target_.log_lam;
    for (int s = 0; s < data_.n_regions(); ++s) {
      const double old = state_.theta_re[s];
      const auto& obs = obs_by_region_[s];
      auto conditional = [&](double v) {
        double lp = normal_logpdf(v, 0.0, state_.sigma);
        for (int i : obs)
          lp += obs_loglik_at(i, log_lam[i] - old + v, coef_target_.eta[i]);
        return lp;
      };
      double v = slice_update_scalar(old, conditional, w_theta_.width, -kInf,
                                     kInf, rng_, config_.slice, &scalar_stats_);
      if (adapting) w_theta_.observe(v - old);
      if (v != old) {
        state_.theta_re[s] = v;
        for (int i : obs) log_lam[i] += v - old;
      }
    }
  }

  void update_gamma(bool adapting) {
    auto& eta = coef_target_.eta;
    for (int i = 0; i < data_.n_obs(); ++i) {
      const double old = state_.gamma_re[i];
      const double lam = std::exp(coef_target_.log_lam[i]);
      auto conditional = [&](double v) {
        double lp = normal_logpdf(v, 0.0, state_.epsilon);
        if (!data_.complete[i]) {
          lp += count_logpmf(spec_, data_.z[i],
                             logistic(eta[i] - old + v) * lam,
                             state_.dispersion);
        }
        return lp;
      };
      double v = slice_update_scalar(old, conditional, w_gamma_.width, -kInf,
                                     kInf, rng_, config_.slice, &scalar_stats_);
      if (adapting) w_gamma_.observe(v - old);
      if (v != old) {
        state_.gamma_re[i] = v;
        eta[i] += v - old;
      }
    }
  }

  // Scale updates interleave the centered conditional (prior + effect
  // density) with a non-centered move that rescales the whole effect
  // vector, gamma = epsilon * eta with eta held fixed. The centered step
  // alone mixes poorly near the funnel neck (small scale, small effects);
  // in the non-centered parameterization the likelihood informs the scale
  // directly and the effect prior drops out.
  void update_scales(bool adapting) {
    const double hn = spec_.priors.halfnormal_scale;
    if (spec_.include_iid_process) {
      double ssq = state_.theta_re.squaredNorm();
      double n = static_cast<double>(state_.theta_re.size());
      auto conditional = [&](double v) {
        if (!(v > 0.0)) return kNegInf;
        return halfnormal_logpdf(v, hn) - n * std::log(v) -
               ssq / (2.0 * v * v);
      };
      double old = state_.sigma;
      state_.sigma = slice_update_scalar(old, conditional, w_sigma_.width, 0.0,
                                         kInf, rng_, config_.slice,
                                         &scalar_stats_);
      if (adapting) w_sigma_.observe(state_.sigma - old);
      rescale_process_effect(state_.theta_re, state_.sigma, w_sigma_nc_,
                             adapting, hn);
    }
    if (spec_.include_icar) {
      double q = icar_pairwise_sum(state_.phi, data_.graph);
      double rank = data_.graph.icar_rank();
      auto conditional = [&](double v) {
        if (!(v > 0.0)) return kNegInf;
        return halfnormal_logpdf(v, hn) - rank * std::log(v) -
               q / (2.0 * v * v);
      };
      double old = state_.nu;
      state_.nu = slice_update_scalar(old, conditional, w_nu_.width, 0.0, kInf,
                                      rng_, config_.slice, &scalar_stats_);
      if (adapting) w_nu_.observe(state_.nu - old);
      rescale_process_effect(state_.phi, state_.nu, w_nu_nc_, adapting, hn);
    }
    if (spec_.include_iid_reporting) {
      double ssq = state_.gamma_re.squaredNorm();
      double n = static_cast<double>(state_.gamma_re.size());
      auto conditional = [&](double v) {
        if (!(v > 0.0)) return kNegInf;
        return halfnormal_logpdf(v, hn) - n * std::log(v) -
               ssq / (2.0 * v * v);
      };
      double old = state_.epsilon;
      state_.epsilon = slice_update_scalar(old, conditional, w_epsilon_.width,
                                           0.0, kInf, rng_, config_.slice,
                                           &scalar_stats_);
      if (adapting) w_epsilon_.observe(state_.epsilon - old);
      rescale_reporting_effect(adapting, hn);
    }
    if (spec_.family == Family::kNegBinomial) {
      // pi * lambda is fixed while the dispersion moves.
      Eigen::VectorXd mean(data_.n_obs());
      for (int i = 0; i < data_.n_obs(); ++i) {
        double pi = data_.complete[i] ? 1.0 : logistic(coef_target_.eta[i]);
        mean[i] = pi * std::exp(coef_target_.log_lam[i]);
      }
      auto conditional = [&](double v) {
        if (!(v > 0.0)) return kNegInf;
        double lp = halfnormal_logpdf(v, spec_.priors.dispersion_scale);
        for (int i = 0; i < data_.n_obs(); ++i) {
          lp += negbin_logpmf(data_.z[i], mean[i], v);
          if (lp == kNegInf) return kNegInf;
        }
        return lp;
      };
      double old = state_.dispersion;
      state_.dispersion = slice_update_scalar(old, conditional,
                                              w_dispersion_.width, 0.0, kInf,
                                              rng_, config_.slice,
                                              &scalar_stats_);
      if (adapting) w_dispersion_.observe(state_.dispersion - old);
    }
  }

  // Non-centered scale move for a per-region effect entering log lambda:
  // effect = scale * eta with eta fixed; the effect's own prior term
  // cancels against the Jacobian, leaving half-Normal(scale) times the
  // likelihood along the rescaling ray.
  void rescale_process_effect(Eigen::VectorXd& effect, double& scale,
                              WidthGroup& width, bool adapting, double hn) {
    const double old = scale;
    Eigen::VectorXd eta = effect / old;
    auto& log_lam = coef_target_.log_lam;
    auto conditional = [&](double v) {
      if (!(v > 0.0)) return kNegInf;
      double lp = halfnormal_logpdf(v, hn);
      for (int i = 0; i < data_.n_obs(); ++i) {
        double shift = (v - old) * eta[data_.units.region[i]];
        lp += obs_loglik_at(i, log_lam[i] + shift, coef_target_.eta[i]);
        if (lp == kNegInf) return kNegInf;
      }
      return lp;
    };
    double v = slice_update_scalar(old, conditional, width.width, 0.0, kInf,
                                   rng_, config_.slice, &scalar_stats_);
    if (adapting) width.observe(v - old);
    if (v != old) {
      scale = v;
      effect = v * eta;
      for (int i = 0; i < data_.n_obs(); ++i)
        log_lam[i] += (v - old) * eta[data_.units.region[i]];
    }
  }

  void rescale_reporting_effect(bool adapting, double hn) {
    const double old = state_.epsilon;
    Eigen::VectorXd eta = state_.gamma_re / old;
    Eigen::VectorXd lam(data_.n_obs());
    for (int i = 0; i < data_.n_obs(); ++i)
      lam[i] = std::exp(coef_target_.log_lam[i]);
    auto conditional = [&](double v) {
      if (!(v > 0.0)) return kNegInf;
      double lp = halfnormal_logpdf(v, hn);
      for (int i = 0; i < data_.n_obs(); ++i) {
        if (data_.complete[i]) continue;
        double pi = logistic(coef_target_.eta[i] + (v - old) * eta[i]);
        lp += count_logpmf(spec_, data_.z[i], pi * lam[i], state_.dispersion);
        if (lp == kNegInf) return kNegInf;
      }
      return lp;
    };
    double v = slice_update_scalar(old, conditional, w_epsilon_nc_.width, 0.0,
                                   kInf, rng_, config_.slice, &scalar_stats_);
    if (adapting) w_epsilon_nc_.observe(v - old);
    if (v != old) {
      state_.epsilon = v;
      state_.gamma_re = v * eta;
      coef_target_.eta += (v - old) * eta;
    }
  }

  void refresh_widths() {
    w_phi_.refresh();
    w_theta_.refresh();
    w_gamma_.refresh();
    w_sigma_.refresh();
    w_nu_.refresh();
    w_epsilon_.refresh();
    w_dispersion_.refresh();
    w_sigma_nc_.refresh();
    w_nu_nc_.refresh();
    w_epsilon_nc_.refresh();
  }

  double kernel_fingerprint() const {
    double f = afss_.widths().sum() + afss_.factors().array().abs().sum();
    f += w_phi_.width + w_theta_.width + w_gamma_.width + w_sigma_.width +
         w_nu_.width + w_epsilon_.width + w_dispersion_.width +
         w_sigma_nc_.width + w_nu_nc_.width + w_epsilon_nc_.width;
    return f;
  }

  const CountDataset& data_;
  const ModelSpec& spec_;
  const ChainConfig& config_;
  ParamLayout layout_;
  Rng rng_;
  ParameterState state_;
  Eigen::VectorXd coef_;
  CoefficientTarget coef_target_;
  std::vector<std::vector<int>> obs_by_region_;
  AfssSampler afss_;
  SliceStats scalar_stats_;
  std::uint64_t chain_seed_ = 0;
  WidthGroup w_phi_, w_theta_, w_gamma_, w_sigma_, w_nu_, w_epsilon_,
      w_dispersion_, w_sigma_nc_, w_nu_nc_, w_epsilon_nc_;
};

}  // namespace

PosteriorSamples run_chains(const CountDataset& data, const ModelSpec& spec,
                            const ChainConfig& config) {
  config.validate();
  spec.validate();

  PosteriorSamples out;
  out.layout = ParamLayout::build(spec, data);
  out.names = out.layout.names();
  out.config = config;
  out.spec_hash = spec_fingerprint(spec, data);
  out.chains.resize(config.n_chains);
  out.diagnostics.resize(config.n_chains);

  std::vector<std::exception_ptr> errors(config.n_chains);
  auto worker = [&](int chain) {
    try {
      ChainRunner runner(data, spec, config, chain);
      ChainResult res = runner.run();
      out.chains[chain] = std::move(res.draws);
      out.diagnostics[chain] = std::move(res.diag);
    } catch (...) {
      errors[chain] = std::current_exception();
    }
  };

  int n_threads = std::max(1, config.n_threads);
  if (n_threads <= 1 || config.n_chains == 1) {
    for (int c = 0; c < config.n_chains; ++c) worker(c);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min(n_threads, config.n_chains); ++t) {
      pool.emplace_back([&, t]() {
        for (int c = t; c < config.n_chains; c += n_threads) worker(c);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

void save_samples(const PosteriorSamples& samples, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (int c = 0; c < samples.n_chains(); ++c) {
    CsvTable table;
    table.header = samples.names;
    const auto& m = samples.chains[c];
    table.rows.reserve(m.rows());
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      std::vector<std::string> row;
      row.reserve(m.cols());
      for (Eigen::Index k = 0; k < m.cols(); ++k)
        row.push_back(format_double(m(r, k)));
      table.rows.push_back(std::move(row));
    }
    write_csv(dir + "/chain_" + std::to_string(c) + ".csv", table);
  }

  nlohmann::json meta;
  meta["seed"] = samples.config.seed;
  meta["n_chains"] = samples.config.n_chains;
  meta["n_iterations"] = samples.config.n_iterations;
  meta["n_burnin"] = samples.config.n_burnin;
  meta["thin"] = samples.config.thin;
  meta["adaptation_interval"] = samples.config.adaptation_interval;
  meta["spec_hash"] = samples.spec_hash;
  meta["layout"] = {
      {"n_alpha", samples.layout.n_alpha},
      {"n_beta", samples.layout.n_beta},
      {"phi_off", samples.layout.phi_off},
      {"n_phi", samples.layout.n_phi},
      {"theta_off", samples.layout.theta_off},
      {"n_theta", samples.layout.n_theta},
      {"gamma_off", samples.layout.gamma_off},
      {"n_gamma", samples.layout.n_gamma},
      {"sigma_idx", samples.layout.sigma_idx},
      {"nu_idx", samples.layout.nu_idx},
      {"epsilon_idx", samples.layout.epsilon_idx},
      {"dispersion_idx", samples.layout.dispersion_idx},
      {"total", samples.layout.total}};
  nlohmann::json chains = nlohmann::json::array();
  for (const auto& d : samples.diagnostics) {
    chains.push_back({{"chain_seed", d.chain_seed},
                      {"afss_budget_hits", d.afss.n_budget_hits},
                      {"scalar_budget_hits", d.scalar.n_budget_hits}});
  }
  meta["chains"] = chains;
  std::ofstream out(dir + "/samples_meta.json");
  if (!out) throw DataError("cannot write " + dir + "/samples_meta.json");
  out << meta.dump(2) << "\n";
}

PosteriorSamples load_samples(const std::string& dir) {
  std::ifstream in(dir + "/samples_meta.json");
  if (!in) throw DataError("cannot open " + dir + "/samples_meta.json");
  nlohmann::json meta = nlohmann::json::parse(in);

  PosteriorSamples samples;
  samples.config.seed = meta.at("seed").get<std::uint64_t>();
  samples.config.n_chains = meta.at("n_chains").get<int>();
  samples.config.n_iterations = meta.at("n_iterations").get<int>();
  samples.config.n_burnin = meta.at("n_burnin").get<int>();
  samples.config.thin = meta.at("thin").get<int>();
  samples.config.adaptation_interval = meta.at("adaptation_interval").get<int>();
  samples.spec_hash = meta.at("spec_hash").get<std::string>();
  const auto& lay = meta.at("layout");
  samples.layout.n_alpha = lay.at("n_alpha").get<int>();
  samples.layout.n_beta = lay.at("n_beta").get<int>();
  samples.layout.phi_off = lay.at("phi_off").get<int>();
  samples.layout.n_phi = lay.at("n_phi").get<int>();
  samples.layout.theta_off = lay.at("theta_off").get<int>();
  samples.layout.n_theta = lay.at("n_theta").get<int>();
  samples.layout.gamma_off = lay.at("gamma_off").get<int>();
  samples.layout.n_gamma = lay.at("n_gamma").get<int>();
  samples.layout.sigma_idx = lay.at("sigma_idx").get<int>();
  samples.layout.nu_idx = lay.at("nu_idx").get<int>();
  samples.layout.epsilon_idx = lay.at("epsilon_idx").get<int>();
  samples.layout.dispersion_idx = lay.at("dispersion_idx").get<int>();
  samples.layout.total = lay.at("total").get<int>();

  for (int c = 0; c < samples.config.n_chains; ++c) {
    std::string path = dir + "/chain_" + std::to_string(c) + ".csv";
    CsvTable table = read_csv(path);
    if (c == 0) {
      samples.names = table.header;
      if (static_cast<int>(samples.names.size()) != samples.layout.total)
        throw DataError(path + ": parameter count does not match the layout");
    } else if (table.header != samples.names) {
      throw DataError(path + ": parameter names differ across chains");
    }
    Eigen::MatrixXd m(table.rows.size(), table.header.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      for (std::size_t k = 0; k < table.header.size(); ++k) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
            parse_double(table.rows[r][k], path, static_cast<int>(r) + 2);
      }
    }
    if (!samples.chains.empty() &&
        m.rows() != samples.chains.front().rows()) {
      throw DataError(path + ": retained length differs across chains");
    }
    samples.chains.push_back(std::move(m));
  }
  samples.diagnostics.resize(samples.config.n_chains);
  return samples;
}

}  // namespace pogit
