#include "rcef/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rcef {

DataSummary accumulate(DataSummary summary, std::span<const Assignment> batch, const StructureGraph& g) {
  if (summary.dimension() != model_dimension(g)) throw std::invalid_argument("summary dimension mismatch");
  for (const auto& x : batch) {
    for (auto j : phi(x, g).indices) ++summary.counts[j];
  }
  summary.n += batch.size();
  return summary;
}

std::vector<int> gradient_sign(const Marginals& marginals, const DataSummary& summary) {
  if (summary.n == 0) throw std::invalid_argument("gradient of an empty summary");
  std::vector<int> signs;
  signs.reserve(summary.dimension());
  for (const auto& block : marginals.edge_weight) {
    for (const auto& w : block) {
      const auto j = signs.size();
      if (j >= summary.dimension()) throw std::invalid_argument("marginals larger than summary");
      const BigInt diff = w * summary.n - summary.counts[j] * marginals.z;
      signs.push_back(diff.sign());
    }
  }
  if (signs.size() != summary.dimension()) throw std::invalid_argument("marginals smaller than summary");
  return signs;
}

IntParams int_prox_step(IntParams params, std::span<const int> signs) {
  if (signs.size() != params.dimension()) throw std::invalid_argument("sign vector has wrong length");
  auto theta = params.theta();
  const auto hi = params.max_value();
  for (std::size_t j = 0; j < theta.size(); ++j) theta[j] = std::clamp<std::int64_t>(theta[j] - signs[j], 0, hi);
  params.set_theta(std::move(theta));
  return params;
}

LearnerState fit(LearnerState state, int budget) {
  for (int i = 0; i < budget; ++i) {
    const auto signs = gradient_sign(sum_product(state.params, Evidence{}), state.summary);
    if (std::all_of(signs.begin(), signs.end(), [](int s) { return s == 0; })) break;
    state.params = int_prox_step(std::move(state.params), signs);
  }
  return state;
}

int predict(const IntParams& params, const Evidence& features) {
  const auto label = params.structure().label_index();
  if (features.state(label)) throw std::invalid_argument("label vertex must not be clamped");
  return map_assignment(params, features)[label];
}

int predict(const IntParams& params, const Assignment& x) {
  return predict(params, Evidence::all_but(x, params.structure().label_index()));
}

namespace {

double oriented(const StructureGraph& g, std::span<const double> theta, const std::vector<std::size_t>& offsets,
                std::size_t e, std::size_t parent, int xp, int xc) {
  const auto& edge = g.edges[e];
  const auto cols = static_cast<std::size_t>(g.arity(edge.t));
  const auto idx = edge.s == parent ? static_cast<std::size_t>(xp) * cols + static_cast<std::size_t>(xc)
                                    : static_cast<std::size_t>(xc) * cols + static_cast<std::size_t>(xp);
  return theta[offsets[e] + idx];
}

// log2 of the sum of 2^x over v.
double log2_sum(const std::vector<double>& v) {
  const double top = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(top)) throw std::runtime_error("degenerate message in float sum-product");
  double total = 0.0;
  for (auto x : v) total += std::exp2(x - top);
  return top + std::log2(total);
}

std::vector<double> normalized(const std::vector<double>& log_weights) {
  const double norm = log2_sum(log_weights);
  std::vector<double> out(log_weights.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp2(log_weights[i] - norm);
  return out;
}

}  // namespace

FloatMarginals float_sum_product(const StructureGraph& g, std::span<const double> theta) {
  if (theta.size() != model_dimension(g)) throw std::invalid_argument("parameter vector has wrong length");
  const RootedTree tree(g);
  const auto offsets = edge_offsets(g);
  const std::size_t n = g.num_vertices();

  // All messages are kept as log2 weights.
  std::vector<std::vector<double>> inner(n), up(n), down(n);
  for (auto it = tree.order.rbegin(); it != tree.order.rend(); ++it) {
    const auto v = *it;
    inner[v].assign(static_cast<std::size_t>(g.arity(v)), 0.0);
    for (auto c : tree.children[v]) {
      for (std::size_t s = 0; s < inner[v].size(); ++s) inner[v][s] += up[c][s];
    }
    if (v == tree.order.front()) continue;
    const auto p = tree.parent[v];
    const auto e = tree.parent_edge[v];
    up[v].assign(static_cast<std::size_t>(g.arity(p)), 0.0);
    std::vector<double> terms(static_cast<std::size_t>(g.arity(v)));
    for (int xp = 0; xp < g.arity(p); ++xp) {
      for (int xc = 0; xc < g.arity(v); ++xc)
        terms[static_cast<std::size_t>(xc)] = inner[v][static_cast<std::size_t>(xc)] + oriented(g, theta, offsets, e, p, xp, xc);
      up[v][static_cast<std::size_t>(xp)] = log2_sum(terms);
    }
  }

  FloatMarginals out;
  const auto root = tree.order.front();
  out.log2_z = log2_sum(inner[root]);

  out.vertex.resize(n);
  out.edge.resize(g.edges.size());
  down[root].assign(static_cast<std::size_t>(g.arity(root)), 0.0);
  for (auto v : tree.order) {
    std::vector<double> belief = inner[v];
    for (std::size_t s = 0; s < belief.size(); ++s) belief[s] += down[v][s];
    out.vertex[v] = normalized(belief);

    for (auto c : tree.children[v]) {
      const auto e = tree.parent_edge[c];
      std::vector<double> outer = down[v];
      for (auto sib : tree.children[v]) {
        if (sib == c) continue;
        for (std::size_t s = 0; s < outer.size(); ++s) outer[s] += up[sib][s];
      }
      const bool parent_is_s = g.edges[e].s == v;
      const auto cols = static_cast<std::size_t>(g.arity(g.edges[e].t));
      std::vector<double> edge(static_cast<std::size_t>(g.arity(v) * g.arity(c)));
      down[c].assign(static_cast<std::size_t>(g.arity(c)), 0.0);
      std::vector<double> terms(static_cast<std::size_t>(g.arity(v)));
      for (int xc = 0; xc < g.arity(c); ++xc) {
        for (int xp = 0; xp < g.arity(v); ++xp) {
          const double w = outer[static_cast<std::size_t>(xp)] + oriented(g, theta, offsets, e, v, xp, xc);
          const auto idx = parent_is_s ? static_cast<std::size_t>(xp) * cols + static_cast<std::size_t>(xc)
                                       : static_cast<std::size_t>(xc) * cols + static_cast<std::size_t>(xp);
          edge[idx] = w + inner[c][static_cast<std::size_t>(xc)];
          terms[static_cast<std::size_t>(xp)] = w;
        }
        down[c][static_cast<std::size_t>(xc)] = log2_sum(terms);
      }
      out.edge[e] = normalized(edge);
    }
  }
  return out;
}

double float_neg_avg_log_likelihood(const StructureGraph& g, std::span<const double> theta, const DataSummary& summary) {
  if (summary.n == 0) throw std::invalid_argument("empty summary");
  const auto m = float_sum_product(g, theta);
  const double n = summary.n.convert_to<double>();
  double inner = 0.0;
  for (std::size_t j = 0; j < theta.size(); ++j) inner += theta[j] * (summary.counts[j].convert_to<double>() / n);
  return m.log2_z - inner;
}

double float_score(const StructureGraph& g, std::span<const double> theta, const Assignment& x) {
  double total = 0.0;
  for (auto j : phi(x, g).indices) total += theta[j];
  return total;
}

int float_predict(const StructureGraph& g, std::span<const double> theta, const Assignment& x) {
  const auto label = g.label_index();
  Assignment probe = x;
  int best_state = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < g.arity(label); ++s) {
    probe[label] = s;
    const double value = float_score(g, theta, probe);
    if (value > best) {
      best = value;
      best_state = s;
    }
  }
  return best_state;
}

FloatLearnerState float_fit(FloatLearnerState state, int budget) {
  if (!state.structure) throw std::invalid_argument("float learner needs a structure");
  if (state.summary.n == 0) throw std::invalid_argument("float_fit on an empty summary");
  const auto& g = *state.structure;
  const double n = state.summary.n.convert_to<double>();
  for (int i = 0; i < budget; ++i) {
    const auto m = float_sum_product(g, state.params_real);
    std::size_t j = 0;
    for (const auto& block : m.edge) {
      for (double p : block) {
        const double grad = p - state.summary.counts[j].convert_to<double>() / n;
        state.params_real[j] -= state.learning_rate * grad;
        if (!std::isfinite(state.params_real[j])) throw std::runtime_error("float parameters diverged");
        ++j;
      }
    }
  }
  return state;
}

}  // namespace rcef
