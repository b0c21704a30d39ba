#include "rcef/inference.hpp"

#include <deque>
#include <limits>
#include <stdexcept>

namespace rcef {

namespace {

using Vec = std::vector<BigInt>;

// Parameter of edge e at (x_parent, x_child), whichever way round the edge is stored.
std::int64_t oriented_param(const IntParams& params, std::size_t e, std::size_t parent, int xp, int xc) {
  const auto& edge = params.structure().edges[e];
  return edge.s == parent ? params.edge_param(e, xp, xc) : params.edge_param(e, xc, xp);
}

Vec evidence_vector(const StructureGraph& g, const Evidence& ev, std::size_t v) {
  Vec out(static_cast<std::size_t>(g.arity(v)));
  for (int s = 0; s < g.arity(v); ++s) out[static_cast<std::size_t>(s)] = ev.allows(v, s) ? 1 : 0;
  return out;
}

struct UpwardPass {
  std::vector<Vec> inner;  // evidence times incoming child messages, over the vertex's own states
  std::vector<Vec> up;     // message to the parent, over the parent's states
};

UpwardPass upward(const IntParams& params, const Evidence& evidence, const RootedTree& tree) {
  const auto& g = params.structure();
  const std::size_t n = g.num_vertices();
  UpwardPass pass;
  pass.inner.resize(n);
  pass.up.resize(n);
  for (auto it = tree.order.rbegin(); it != tree.order.rend(); ++it) {
    const std::size_t v = *it;
    Vec inner = evidence_vector(g, evidence, v);
    for (auto c : tree.children[v]) {
      for (std::size_t s = 0; s < inner.size(); ++s) inner[s] *= pass.up[c][s];
    }
    if (v != tree.order.front()) {
      const std::size_t p = tree.parent[v];
      Vec up(static_cast<std::size_t>(g.arity(p)), 0);
      for (int xp = 0; xp < g.arity(p); ++xp) {
        BigInt acc = 0;
        for (int xc = 0; xc < g.arity(v); ++xc) {
          const auto& w = inner[static_cast<std::size_t>(xc)];
          if (w == 0) continue;
          acc += w << static_cast<unsigned>(oriented_param(params, tree.parent_edge[v], p, xp, xc));
        }
        up[static_cast<std::size_t>(xp)] = std::move(acc);
      }
      pass.up[v] = std::move(up);
    }
    pass.inner[v] = std::move(inner);
  }
  return pass;
}

}  // namespace

Evidence Evidence::all_but(const Assignment& x, std::size_t free_vertex) {
  std::vector<std::optional<int>> clamped(x.begin(), x.end());
  clamped.at(free_vertex).reset();
  return Evidence(std::move(clamped));
}

void Evidence::check(const StructureGraph& g) const {
  for (std::size_t v = 0; v < clamped_.size(); ++v) {
    if (!clamped_[v]) continue;
    if (v >= g.num_vertices()) throw std::out_of_range("evidence on unknown vertex");
    if (*clamped_[v] < 0 || *clamped_[v] >= g.arity(v)) throw std::out_of_range("evidence state out of range");
  }
}

RootedTree::RootedTree(const StructureGraph& g) {
  if (auto problem = validate_tree(g)) throw std::invalid_argument("not a tree: " + *problem);
  const std::size_t n = g.num_vertices();
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacent(n);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    adjacent[g.edges[e].s].emplace_back(g.edges[e].t, e);
    adjacent[g.edges[e].t].emplace_back(g.edges[e].s, e);
  }
  parent.assign(n, 0);
  parent_edge.assign(n, 0);
  children.assign(n, {});
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    order.push_back(v);
    for (auto [w, e] : adjacent[v]) {
      if (seen[w]) continue;
      seen[w] = true;
      parent[w] = v;
      parent_edge[w] = e;
      children[v].push_back(w);
      queue.push_back(w);
    }
  }
}

bool same_marginals(const Marginals& a, const Marginals& b) {
  if (a.vertex_weight.size() != b.vertex_weight.size() || a.edge_weight.size() != b.edge_weight.size()) return false;
  auto same = [&](const std::vector<Vec>& x, const std::vector<Vec>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].size() != y[i].size()) return false;
      for (std::size_t j = 0; j < x[i].size(); ++j) {
        if (Rational(x[i][j], a.z) != Rational(y[i][j], b.z)) return false;
      }
    }
    return true;
  };
  return same(a.vertex_weight, b.vertex_weight) && same(a.edge_weight, b.edge_weight);
}

std::vector<std::vector<BigInt>> subtree_weights(const IntParams& params, const Evidence& evidence,
                                                 const RootedTree& tree) {
  evidence.check(params.structure());
  return upward(params, evidence, tree).inner;
}

BigInt evidence_partition(const IntParams& params, const Evidence& evidence) {
  evidence.check(params.structure());
  const RootedTree tree(params.structure());
  const auto pass = upward(params, evidence, tree);
  BigInt z = 0;
  for (const auto& w : pass.inner[tree.order.front()]) z += w;
  return z;
}

Marginals sum_product(const IntParams& params, const Evidence& evidence) {
  const auto& g = params.structure();
  evidence.check(g);
  const RootedTree tree(g);
  const std::size_t n = g.num_vertices();
  auto pass = upward(params, evidence, tree);

  // full[v] = inner[v] * (message from parent); the unnormalized vertex belief.
  std::vector<Vec> full(n);
  const auto root = tree.order.front();
  full[root] = pass.inner[root];

  Marginals out;
  out.edge_weight.resize(g.edges.size());
  for (auto v : tree.order) {
    for (auto c : tree.children[v]) {
      const auto e = tree.parent_edge[c];
      const bool parent_is_s = g.edges[e].s == v;
      const auto cols = static_cast<std::size_t>(g.arity(g.edges[e].t));
      // Belief at v with the message from c divided out. Messages are
      // positive because every weight 2^theta is at least one.
      Vec outer(full[v].size());
      for (std::size_t s = 0; s < outer.size(); ++s) outer[s] = full[v][s] / pass.up[c][s];

      Vec down(static_cast<std::size_t>(g.arity(c)), 0);
      Vec& edge = out.edge_weight[e];
      edge.assign(static_cast<std::size_t>(g.arity(v) * g.arity(c)), 0);
      for (int xp = 0; xp < g.arity(v); ++xp) {
        const auto& o = outer[static_cast<std::size_t>(xp)];
        if (o == 0) continue;
        for (int xc = 0; xc < g.arity(c); ++xc) {
          const BigInt weighted = o << static_cast<unsigned>(oriented_param(params, e, v, xp, xc));
          const auto& in = pass.inner[c][static_cast<std::size_t>(xc)];
          const auto idx = parent_is_s ? static_cast<std::size_t>(xp) * cols + static_cast<std::size_t>(xc)
                                       : static_cast<std::size_t>(xc) * cols + static_cast<std::size_t>(xp);
          edge[idx] = weighted * in;
          down[static_cast<std::size_t>(xc)] += weighted;
        }
      }
      full[c] = std::move(pass.inner[c]);
      for (std::size_t s = 0; s < full[c].size(); ++s) full[c][s] *= down[s];
    }
  }

  for (const auto& w : full[root]) out.z += w;
  out.vertex_weight = std::move(full);
  return out;
}

Marginals brute_force(const IntParams& params, const Evidence& evidence) {
  const auto& g = params.structure();
  evidence.check(g);
  std::size_t states = 1;
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    if (evidence.state(v)) continue;
    states *= static_cast<std::size_t>(g.arity(v));
    if (states > kBruteForceLimit) throw std::length_error("state space too large for enumeration");
  }

  Marginals out;
  out.vertex_weight.resize(g.num_vertices());
  for (std::size_t v = 0; v < g.num_vertices(); ++v) out.vertex_weight[v].assign(static_cast<std::size_t>(g.arity(v)), 0);
  out.edge_weight.resize(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    out.edge_weight[e].assign(static_cast<std::size_t>(g.arity(g.edges[e].s) * g.arity(g.edges[e].t)), 0);
  const auto offsets = edge_offsets(g);

  for_each_assignment(g, evidence, [&](const Assignment& x) {
    const auto stat = phi(x, g);
    std::int64_t s = 0;
    for (auto j : stat.indices) s += params[j];
    const BigInt w = BigInt(1) << static_cast<unsigned>(s);
    out.z += w;
    for (std::size_t v = 0; v < x.size(); ++v) out.vertex_weight[v][static_cast<std::size_t>(x[v])] += w;
    for (std::size_t e = 0; e < stat.indices.size(); ++e) out.edge_weight[e][stat.indices[e] - offsets[e]] += w;
  });
  return out;
}

Assignment map_assignment(const IntParams& params, const Evidence& evidence) {
  const auto& g = params.structure();
  evidence.check(g);
  const RootedTree tree(g);
  const std::size_t n = g.num_vertices();
  constexpr auto kForbidden = std::numeric_limits<std::int64_t>::min();

  std::vector<std::vector<std::int64_t>> inner(n);
  std::vector<std::vector<std::int64_t>> up(n);
  std::vector<std::vector<int>> best_child_state(n);
  for (auto it = tree.order.rbegin(); it != tree.order.rend(); ++it) {
    const auto v = *it;
    auto& in = inner[v];
    in.assign(static_cast<std::size_t>(g.arity(v)), 0);
    for (int s = 0; s < g.arity(v); ++s) {
      if (!evidence.allows(v, s)) {
        in[static_cast<std::size_t>(s)] = kForbidden;
        continue;
      }
      for (auto c : tree.children[v]) in[static_cast<std::size_t>(s)] += up[c][static_cast<std::size_t>(s)];
    }
    if (v == tree.order.front()) continue;
    const auto p = tree.parent[v];
    up[v].assign(static_cast<std::size_t>(g.arity(p)), kForbidden);
    best_child_state[v].assign(static_cast<std::size_t>(g.arity(p)), 0);
    for (int xp = 0; xp < g.arity(p); ++xp) {
      for (int xc = 0; xc < g.arity(v); ++xc) {
        const auto base = in[static_cast<std::size_t>(xc)];
        if (base == kForbidden) continue;
        const auto value = base + oriented_param(params, tree.parent_edge[v], p, xp, xc);
        if (value > up[v][static_cast<std::size_t>(xp)]) {
          up[v][static_cast<std::size_t>(xp)] = value;
          best_child_state[v][static_cast<std::size_t>(xp)] = xc;
        }
      }
    }
  }

  Assignment x(n, 0);
  const auto root = tree.order.front();
  std::int64_t best = kForbidden;
  for (int s = 0; s < g.arity(root); ++s) {
    const auto value = inner[root][static_cast<std::size_t>(s)];
    if (value != kForbidden && value > best) {
      best = value;
      x[root] = s;
    }
  }
  for (auto v : tree.order) {
    for (auto c : tree.children[v]) x[c] = best_child_state[c][static_cast<std::size_t>(x[v])];
  }
  return x;
}

}  // namespace rcef
