#pragma once

// Seeded random instances shared by the unit and acceptance tests.

#include <algorithm>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "rcef/graph.hpp"
#include "rcef/inference.hpp"
#include "rcef/intmodel.hpp"
#include "rcef/random.hpp"

namespace rcef::testing {

inline int uniform_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

/// Random labelled tree: vertices join in shuffled order, each attaching to a
/// uniformly chosen earlier vertex. One random vertex is the label.
inline std::shared_ptr<const StructureGraph> random_tree(Rng& rng, int vertices, int max_arity) {
  StructureGraph g;
  for (int v = 0; v < vertices; ++v)
    g.variables.push_back({"v" + std::to_string(v), uniform_int(rng, 2, max_arity), Role::Feature});
  g.variables[uniform_index(rng, static_cast<std::uint64_t>(vertices))].role = Role::Label;
  std::vector<std::size_t> order(static_cast<std::size_t>(vertices));
  std::iota(order.begin(), order.end(), 0);
  fisher_yates(order, rng);
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto other = order[uniform_index(rng, i)];
    g.edges.push_back({std::min(order[i], other), std::max(order[i], other)});
  }
  std::sort(g.edges.begin(), g.edges.end());
  return std::make_shared<const StructureGraph>(std::move(g));
}

inline std::vector<std::int64_t> random_theta(Rng& rng, const StructureGraph& g, int k) {
  std::vector<std::int64_t> theta(model_dimension(g));
  for (auto& t : theta) t = static_cast<std::int64_t>(uniform_index(rng, std::uint64_t{1} << k));
  return theta;
}

inline IntParams random_params(Rng& rng, std::shared_ptr<const StructureGraph> g, int k) {
  auto theta = random_theta(rng, *g, k);
  return IntParams(std::move(g), k, std::move(theta));
}

/// Each vertex clamped independently with probability `clamp_rate`.
inline Evidence random_evidence(Rng& rng, const StructureGraph& g, double clamp_rate) {
  Evidence ev;
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    if (uniform_unit(rng) < clamp_rate) ev.clamp(v, uniform_int(rng, 0, g.arity(v) - 1));
  }
  return ev;
}

inline Assignment random_assignment(Rng& rng, const StructureGraph& g) {
  Assignment x(g.num_vertices());
  for (std::size_t v = 0; v < x.size(); ++v) x[v] = uniform_int(rng, 0, g.arity(v) - 1);
  return x;
}

inline std::vector<Assignment> random_rows(Rng& rng, const StructureGraph& g, std::size_t n) {
  std::vector<Assignment> rows;
  for (std::size_t i = 0; i < n; ++i) rows.push_back(random_assignment(rng, g));
  return rows;
}

/// A path 0 - 1 - ... - (n-1) with the given arities; the last vertex is the label.
inline std::shared_ptr<const StructureGraph> chain(std::vector<int> arities) {
  StructureGraph g;
  for (std::size_t v = 0; v < arities.size(); ++v)
    g.variables.push_back({"x" + std::to_string(v), arities[v], v + 1 == arities.size() ? Role::Label : Role::Feature});
  for (std::size_t v = 0; v + 1 < arities.size(); ++v) g.edges.push_back({v, v + 1});
  return std::make_shared<const StructureGraph>(std::move(g));
}

/// A single edge between a feature (vertex 0) and the label (vertex 1).
inline std::shared_ptr<const StructureGraph> single_edge(int a0, int a1) { return chain({a0, a1}); }

}  // namespace rcef::testing
