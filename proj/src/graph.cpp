#include "pogit/graph.hpp"

#include <algorithm>
#include <queue>
#include <string>

#include "pogit/errors.hpp"

namespace pogit {

AdjacencyGraph::AdjacencyGraph(std::vector<std::vector<int>> neighbors)
    : neighbors_(std::move(neighbors)) {
  const int n = n_regions();
  for (int s = 0; s < n; ++s) {
    for (int t : neighbors_[s]) {
      if (t < 0 || t >= n) {
        throw ConfigError("adjacency: neighbor id " + std::to_string(t) +
                          " of region " + std::to_string(s) + " out of range");
      }
      if (t == s) {
        throw ConfigError("adjacency: self-loop at region " +
                          std::to_string(s));
      }
      const auto& back = neighbors_[t];
      if (std::find(back.begin(), back.end(), s) == back.end()) {
        throw ConfigError("adjacency: edge " + std::to_string(s) + "-" +
                          std::to_string(t) + " is not symmetric");
      }
    }
  }
  int directed = 0;
  for (const auto& nb : neighbors_) directed += static_cast<int>(nb.size());
  n_edges_ = directed / 2;

  component_.assign(n, -1);
  n_components_ = 0;
  for (int s = 0; s < n; ++s) {
    if (component_[s] >= 0) continue;
    std::queue<int> frontier;
    frontier.push(s);
    component_[s] = n_components_;
    while (!frontier.empty()) {
      int u = frontier.front();
      frontier.pop();
      for (int v : neighbors_[u]) {
        if (component_[v] < 0) {
          component_[v] = n_components_;
          frontier.push(v);
        }
      }
    }
    ++n_components_;
  }
}

AdjacencyGraph AdjacencyGraph::lattice(int side) {
  std::vector<std::vector<int>> nb(static_cast<std::size_t>(side) * side);
  auto id = [side](int r, int c) { return r * side + c; };
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      if (r > 0) nb[id(r, c)].push_back(id(r - 1, c));
      if (r + 1 < side) nb[id(r, c)].push_back(id(r + 1, c));
      if (c > 0) nb[id(r, c)].push_back(id(r, c - 1));
      if (c + 1 < side) nb[id(r, c)].push_back(id(r, c + 1));
    }
  }
  return AdjacencyGraph(std::move(nb));
}

}  // namespace pogit
