#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rcef/intmodel.hpp"

namespace rcef {

/// Observed states for a subset of vertices. Unlisted vertices are free.
class Evidence {
 public:
  Evidence() = default;
  explicit Evidence(std::vector<std::optional<int>> clamped) : clamped_(std::move(clamped)) {}

  void clamp(std::size_t v, int state) {
    if (clamped_.size() <= v) clamped_.resize(v + 1);
    clamped_[v] = state;
  }
  std::optional<int> state(std::size_t v) const { return v < clamped_.size() ? clamped_[v] : std::nullopt; }
  bool allows(std::size_t v, int s) const {
    const auto c = state(v);
    return !c || *c == s;
  }

  /// Evidence fixing every vertex except `free_vertex` to its value in x.
  static Evidence all_but(const Assignment& x, std::size_t free_vertex);

  void check(const StructureGraph& g) const;

 private:
  std::vector<std::optional<int>> clamped_;
};

/// Exact marginals sharing the common denominator z. Probabilities are
/// vertex_weight[v][s] / z and edge_weight[e][a * arity(t) + b] / z.
struct Marginals {
  BigInt z = 0;
  std::vector<std::vector<BigInt>> vertex_weight;
  std::vector<std::vector<BigInt>> edge_weight;

  Rational vertex(std::size_t v, int s) const { return {vertex_weight[v][static_cast<std::size_t>(s)], z}; }
  Rational edge(std::size_t e, std::size_t j) const { return {edge_weight[e][j], z}; }
};

/// Equal iff every vertex and edge marginal matches as an exact fraction.
bool same_marginals(const Marginals& a, const Marginals& b);

/// Vertex 0 as root; BFS order, parent links and child lists.
struct RootedTree {
  std::vector<std::size_t> order;
  std::vector<std::size_t> parent;       // parent[root] == root
  std::vector<std::size_t> parent_edge;  // unused for the root
  std::vector<std::vector<std::size_t>> children;

  explicit RootedTree(const StructureGraph& g);
};

/// Leaf-to-root pass: for every vertex v and state s, the evidence-consistent
/// weight of v's subtree with x_v = s. Summing the root's entries gives Z.
std::vector<std::vector<BigInt>> subtree_weights(const IntParams& params, const Evidence& evidence, const RootedTree& tree);

/// Exact integer sum-product with a leaf-to-root then root-to-leaf schedule.
Marginals sum_product(const IntParams& params, const Evidence& evidence);

/// Sum of 2^score over evidence-consistent assignments (upward pass only).
BigInt evidence_partition(const IntParams& params, const Evidence& evidence);

/// Enumeration oracle. Throws std::length_error above kBruteForceLimit states.
inline constexpr std::size_t kBruteForceLimit = 1'000'000;
Marginals brute_force(const IntParams& params, const Evidence& evidence);

/// Evidence-consistent maximizer of score(x) via integer max-sum. Ties go to
/// the lowest state, deciding the root first and then each child given its parent.
Assignment map_assignment(const IntParams& params, const Evidence& evidence);

/// Calls fn(x) for every evidence-consistent assignment in mixed-radix order.
template <typename Fn>
void for_each_assignment(const StructureGraph& g, const Evidence& evidence, Fn&& fn) {
  const std::size_t n = g.num_vertices();
  Assignment x(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (auto c = evidence.state(v)) x[v] = *c;
  }
  while (true) {
    fn(static_cast<const Assignment&>(x));
    std::size_t v = 0;
    for (; v < n; ++v) {
      if (evidence.state(v)) continue;
      if (++x[v] < g.arity(v)) break;
      x[v] = 0;
    }
    if (v == n) return;
  }
}

}  // namespace rcef
