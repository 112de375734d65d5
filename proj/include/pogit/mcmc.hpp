#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "pogit/data.hpp"
#include "pogit/model.hpp"
#include "pogit/slice.hpp"

namespace pogit {

struct ChainConfig {
  int n_iterations = 20000;
  int n_burnin = 10000;
  int thin = 2;
  std::uint64_t seed = 1;
  int n_chains = 4;
  int adaptation_interval = 100;
  int n_threads = 1;
  SliceOptions slice;
  bool kernel_trace = false;  // record kernel fingerprints post burn-in

  void validate() const;
  int n_retained() const {
    return (n_iterations - n_burnin + thin - 1) / thin;
  }
};

// Maps a flat draw row onto the ParameterState fields. Offsets are -1 for
// components the spec leaves out.
struct ParamLayout {
  int n_alpha = 0;
  int n_beta = 0;
  int phi_off = -1, n_phi = 0;
  int theta_off = -1, n_theta = 0;
  int gamma_off = -1, n_gamma = 0;
  int sigma_idx = -1, nu_idx = -1, epsilon_idx = -1, dispersion_idx = -1;
  int total = 0;

  static ParamLayout build(const ModelSpec& spec, const CountDataset& data);
  std::vector<std::string> names() const;
  ParameterState unpack(const Eigen::VectorXd& row) const;
  void pack(const ParameterState& state, Eigen::VectorXd& row) const;
};

struct ChainDiagnostics {
  std::uint64_t chain_seed = 0;
  SliceStats afss;
  SliceStats scalar;
  std::vector<double> kernel_trace;  // one fingerprint per retained draw
};

// Multi-chain draw store. Chains all have the same retained length and
// parameter set; provenance (seed, config, spec fingerprint) travels with
// the draws.
struct PosteriorSamples {
  std::vector<std::string> names;
  ParamLayout layout;
  std::vector<Eigen::MatrixXd> chains;  // each: retained x total
  ChainConfig config;
  std::string spec_hash;
  std::vector<ChainDiagnostics> diagnostics;

  int n_chains() const { return static_cast<int>(chains.size()); }
  int n_retained() const {
    return chains.empty() ? 0 : static_cast<int>(chains.front().rows());
  }
  int index_of(const std::string& name) const;  // -1 if absent
  // Column `idx` of every chain, for the convergence diagnostics.
  std::vector<Eigen::VectorXd> parameter(int idx) const;
};

// Fingerprint of the model structure + priors + data dimensions; stored in
// sample metadata so downstream commands can detect mismatched configs.
std::string spec_fingerprint(const ModelSpec& spec, const CountDataset& data);

// Runs n_chains independent chains of the block sampler: one AFSS sweep
// over (alpha, beta) jointly, univariate slice updates for random effects
// and scales, per-component re-centering of phi folded into alpha0 after
// every sweep. Adaptation (AFSS factors/widths, scalar widths) runs during
// burn-in only; each chain is reproducible from (seed, chain index).
PosteriorSamples run_chains(const CountDataset& data, const ModelSpec& spec,
                            const ChainConfig& config);

void save_samples(const PosteriorSamples& samples, const std::string& dir);
PosteriorSamples load_samples(const std::string& dir);

}  // namespace pogit
