#include "pogit/data.hpp"

#include <cmath>
#include <set>
#include <string>

#include "pogit/errors.hpp"

namespace pogit {

void ModelSpec::validate() const {
  std::set<std::string> seen;
  for (const auto* terms : {&process_terms, &reporting_terms}) {
    for (const auto& t : *terms) {
      if (t.degree < 1) {
        throw ConfigError("model spec: degree of '" + t.name +
                          "' must be >= 1");
      }
      if (!seen.insert(t.name).second) {
        throw ConfigError("model spec: covariate '" + t.name +
                          "' assigned to more than one submodel");
      }
    }
  }
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0)) {
      throw ConfigError(std::string("model spec: ") + what +
                        " must be positive");
    }
  };
  positive(priors.alpha0_sd, "alpha0_sd");
  positive(priors.beta0_sd, "beta0_sd");
  positive(priors.coef_sd, "coef_sd");
  positive(priors.halfnormal_scale, "halfnormal_scale");
  positive(priors.dispersion_scale, "dispersion_scale");
}

std::vector<std::vector<int>> CountDataset::obs_by_region() const {
  std::vector<std::vector<int>> out(graph.n_regions());
  for (int i = 0; i < n_obs(); ++i) out[units.region[i]].push_back(i);
  return out;
}

namespace {

Eigen::MatrixXd expand_terms(const RawData& raw,
                             const std::vector<Term>& terms,
                             std::vector<FittedTerm>& fitted) {
  int total = 0;
  for (const auto& t : terms) total += t.degree;
  Eigen::MatrixXd out(raw.n_obs(), total);
  int col = 0;
  for (const auto& t : terms) {
    auto it = raw.covariates.find(t.name);
    if (it == raw.covariates.end()) {
      throw ConfigError("dataset: covariate column '" + t.name +
                        "' not present in data");
    }
    OrthoPolyBasis basis = OrthoPolyBasis::fit(it->second, t.degree);
    out.middleCols(col, t.degree) = basis.evaluate(it->second);
    fitted.push_back({t.name, t.degree, basis, col});
    col += t.degree;
  }
  return out;
}

}  // namespace

CountDataset build_dataset(const RawData& raw, const ModelSpec& spec) {
  spec.validate();
  const int n = raw.n_obs();
  if (raw.offset.size() != n ||
      static_cast<int>(raw.complete.size()) != n ||
      static_cast<int>(raw.units.region.size()) != n ||
      static_cast<int>(raw.units.time.size()) != n ||
      static_cast<int>(raw.units.group.size()) != n) {
    throw ConfigError("dataset: per-observation field lengths disagree");
  }
  for (int i = 0; i < n; ++i) {
    if (raw.z[i] < 0) {
      throw DataError("dataset: negative count at observation " +
                      std::to_string(i));
    }
    if (!std::isfinite(raw.offset[i])) {
      throw DataError("dataset: non-finite offset at observation " +
                      std::to_string(i));
    }
    if (raw.complete[i] > 1) {
      throw DataError("dataset: completeness flag must be 0 or 1 at " +
                      std::to_string(i));
    }
    int s = raw.units.region[i];
    if (s < 0 || s >= raw.graph.n_regions()) {
      throw DataError("dataset: region id " + std::to_string(s) +
                      " at observation " + std::to_string(i) +
                      " missing from adjacency graph");
    }
  }
  for (const auto& [name, col] : raw.covariates) {
    if (col.size() != n) {
      throw ConfigError("dataset: covariate '" + name + "' has length " +
                        std::to_string(col.size()));
    }
  }

  CountDataset data;
  data.z = raw.z;
  data.units = raw.units;
  data.offset = raw.offset;
  data.complete = raw.complete;
  data.graph = raw.graph;
  data.X = expand_terms(raw, spec.process_terms, data.process_design);
  data.W = expand_terms(raw, spec.reporting_terms, data.reporting_design);
  return data;
}

}  // namespace pogit
