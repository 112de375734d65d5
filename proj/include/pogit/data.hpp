#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pogit/graph.hpp"
#include "pogit/model_spec.hpp"
#include "pogit/ortho_poly.hpp"

namespace pogit {

// Per-observation (group, time, region) labels. Region ids are 0-based and
// index into the adjacency graph; time and group are free integer labels.
struct UnitIndex {
  std::vector<int> group;
  std::vector<int> time;
  std::vector<int> region;
};

// Ingested but not yet design-expanded data: recorded counts plus named raw
// covariate columns. The model spec decides which covariates enter which
// predictor and with what polynomial degree.
struct RawData {
  Eigen::VectorXi z;
  UnitIndex units;
  Eigen::VectorXd offset;          // log-population; 0 when absent
  std::vector<std::uint8_t> complete;
  std::map<std::string, Eigen::VectorXd> covariates;
  AdjacencyGraph graph;
  std::vector<long long> region_ids;  // dense index -> original file id

  int n_obs() const { return static_cast<int>(z.size()); }
};

// A fitted polynomial expansion of one raw covariate, with its column range
// in the expanded design matrix.
struct FittedTerm {
  std::string name;
  int degree = 1;
  OrthoPolyBasis basis;
  int col_start = 0;  // first column in X (or W)
};

// Design-expanded dataset consumed by the likelihood and the sampler.
// X and W hold the basis columns only (intercepts are separate), with zero
// column means over the training points by construction.
struct CountDataset {
  Eigen::VectorXi z;
  UnitIndex units;
  Eigen::MatrixXd X;  // process basis columns
  Eigen::MatrixXd W;  // reporting basis columns
  Eigen::VectorXd offset;
  std::vector<std::uint8_t> complete;
  AdjacencyGraph graph;
  std::vector<FittedTerm> process_design;
  std::vector<FittedTerm> reporting_design;

  int n_obs() const { return static_cast<int>(z.size()); }
  int n_regions() const { return graph.n_regions(); }

  // Observation lists by region, used by the per-region conditionals.
  std::vector<std::vector<int>> obs_by_region() const;
};

// Expands raw covariates into centered orthogonal polynomial columns per
// the spec and validates the dataset invariants (counts >= 0, finite
// offsets, region ids in range, binary completeness flags).
CountDataset build_dataset(const RawData& raw, const ModelSpec& spec);

}  // namespace pogit
