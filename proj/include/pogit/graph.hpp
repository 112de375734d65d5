#pragma once

#include <vector>

namespace pogit {

// Symmetric region adjacency with no self-loops. Connected components are
// computed once at construction; the ICAR density and its sum-to-zero
// constraint are defined per component.
class AdjacencyGraph {
 public:
  AdjacencyGraph() = default;

  // Throws ConfigError on asymmetric neighbor lists or self-loops.
  explicit AdjacencyGraph(std::vector<std::vector<int>> neighbors);

  static AdjacencyGraph lattice(int side);

  int n_regions() const { return static_cast<int>(neighbors_.size()); }
  int n_edges() const { return n_edges_; }
  int n_components() const { return n_components_; }
  const std::vector<int>& neighbors(int s) const { return neighbors_[s]; }
  int component(int s) const { return component_[s]; }

  // Rank of the ICAR precision: n_regions - n_components.
  int icar_rank() const { return n_regions() - n_components_; }

 private:
  std::vector<std::vector<int>> neighbors_;
  std::vector<int> component_;
  int n_edges_ = 0;
  int n_components_ = 0;
};

}  // namespace pogit
