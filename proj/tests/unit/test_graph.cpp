#include <doctest.h>

#include <cmath>
#include <sstream>

#include "generators.hpp"
#include "rcef/graph.hpp"

using namespace rcef;
using namespace rcef::testing;

namespace {

CountMatrix matrix(std::size_t rows, std::size_t cols, std::vector<std::uint64_t> counts) {
  return {rows, cols, std::move(counts)};
}

// Direct evaluation of sum p_ij log2(p_ij / (p_i p_j)) from probabilities.
double mi_oracle(const CountMatrix& m) {
  double n = 0;
  for (auto c : m.counts) n += static_cast<double>(c);
  double mi = 0;
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      const double p = static_cast<double>(m.at(i, j)) / n;
      if (p == 0) continue;
      double pi = 0, pj = 0;
      for (std::size_t b = 0; b < m.cols; ++b) pi += static_cast<double>(m.at(i, b)) / n;
      for (std::size_t a = 0; a < m.rows; ++a) pj += static_cast<double>(m.at(a, j)) / n;
      mi += p * std::log2(p / (pi * pj));
    }
  }
  return mi;
}

std::vector<VariableSpec> binary_specs(int n) {
  std::vector<VariableSpec> specs;
  for (int v = 0; v < n; ++v) specs.push_back({"v" + std::to_string(v), 2, v == n - 1 ? Role::Label : Role::Feature});
  return specs;
}

double tree_weight(std::span<const Assignment> rows, const std::vector<VariableSpec>& specs,
                   const std::vector<Edge>& edges) {
  double total = 0;
  for (const auto& e : edges) total += mutual_information(joint_counts(rows, specs, e.s, e.t));
  return total;
}

// Best total MI over every spanning tree, by enumerating edge subsets.
double best_spanning_weight(std::span<const Assignment> rows, const std::vector<VariableSpec>& specs,
                            std::size_t* tree_count) {
  const std::size_t n = specs.size();
  std::vector<Edge> all;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = s + 1; t < n; ++t) all.push_back({s, t});
  double best = -1;
  *tree_count = 0;
  for (std::uint32_t mask = 0; mask < (1u << all.size()); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != n - 1) continue;
    StructureGraph g{specs, {}};
    for (std::size_t i = 0; i < all.size(); ++i)
      if (mask & (1u << i)) g.edges.push_back(all[i]);
    if (validate_tree(g)) continue;
    ++*tree_count;
    best = std::max(best, tree_weight(rows, specs, g.edges));
  }
  return best;
}

}  // namespace

TEST_CASE("mutual information of small tables") {
  CHECK(mutual_information(matrix(2, 2, {1, 1, 1, 1})) == 0.0);
  CHECK(mutual_information(matrix(2, 2, {2, 0, 0, 2})) == doctest::Approx(1.0).epsilon(1e-15));

  const auto m = matrix(2, 2, {3, 1, 1, 3});
  const double expected = 0.18872187554086717;  // frozen from mi_oracle
  CHECK(mi_oracle(m) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(mutual_information(m) == doctest::Approx(expected).epsilon(1e-14));

  CHECK_THROWS_WITH(mutual_information(matrix(2, 2, {0, 0, 0, 0})), "empty counts");
}

TEST_CASE("mutual information agrees with the direct evaluation on random tables") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto r = static_cast<std::size_t>(uniform_int(rng, 1, 5));
    const auto c = static_cast<std::size_t>(uniform_int(rng, 1, 5));
    CountMatrix m{r, c, std::vector<std::uint64_t>(r * c)};
    for (auto& x : m.counts) x = uniform_index(rng, 4) == 0 ? 0 : uniform_index(rng, 50);
    m.counts[0] += 1;
    const double got = mutual_information(m);
    CHECK(got >= 0.0);
    CHECK(got == doctest::Approx(std::max(0.0, mi_oracle(m))).epsilon(1e-9));
  }
}

TEST_CASE("chow_liu breaks ties lexicographically") {
  // All eight states of three binary variables once: every pair independent.
  std::vector<Assignment> rows;
  for (int x = 0; x < 8; ++x) rows.push_back({x & 1, (x >> 1) & 1, (x >> 2) & 1});
  const auto g = chow_liu(rows, binary_specs(3));
  CHECK(g.edges == std::vector<Edge>{{0, 1}, {0, 2}});
}

TEST_CASE("chow_liu keeps the edge between identical variables") {
  Rng rng(3);
  std::vector<Assignment> rows;
  for (int i = 0; i < 200; ++i) {
    const int c = uniform_int(rng, 0, 1);
    const int ab = uniform_int(rng, 0, 1);
    rows.push_back({c, ab, ab});
  }
  const auto g = chow_liu(rows, binary_specs(3));
  CHECK(std::find(g.edges.begin(), g.edges.end(), Edge{1, 2}) != g.edges.end());
  CHECK_FALSE(validate_tree(g));
}

TEST_CASE("chow_liu maximizes total mutual information over all spanning trees") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Rng rng(seed);
    const int n = 5 + static_cast<int>(seed % 2);
    std::vector<VariableSpec> specs;
    for (int v = 0; v < n; ++v) specs.push_back({"v" + std::to_string(v), uniform_int(rng, 2, 3), Role::Feature});
    specs.back().role = Role::Label;
    // Correlated rows: each variable copies an earlier one with some probability.
    std::vector<Assignment> rows;
    for (int i = 0; i < 300; ++i) {
      Assignment x(static_cast<std::size_t>(n));
      for (int v = 0; v < n; ++v) {
        const auto a = specs[static_cast<std::size_t>(v)].arity;
        x[static_cast<std::size_t>(v)] = (v > 0 && uniform_unit(rng) < 0.6)
                                             ? x[uniform_index(rng, static_cast<std::uint64_t>(v))] % a
                                             : uniform_int(rng, 0, a - 1);
      }
      rows.push_back(std::move(x));
    }
    std::size_t trees = 0;
    const double best = best_spanning_weight(rows, specs, &trees);
    CHECK(trees == static_cast<std::size_t>(std::pow(n, n - 2)));  // Cayley's formula
    const auto g = chow_liu(rows, specs);
    CHECK_FALSE(validate_tree(g));
    CHECK(tree_weight(rows, specs, g.edges) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("chow_liu is invariant under row permutation") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    auto g = random_tree(rng, 6, 3);
    auto rows = random_rows(rng, *g, 100);
    const auto before = chow_liu(rows, g->variables);
    fisher_yates(rows, rng);
    CHECK(chow_liu(rows, g->variables).edges == before.edges);
  }
}

TEST_CASE("chow_liu rejects degenerate inputs") {
  const std::vector<Assignment> rows{{0}};
  CHECK_THROWS_AS(chow_liu(rows, binary_specs(1)), std::invalid_argument);
  CHECK_THROWS_AS(chow_liu({}, binary_specs(2)), std::invalid_argument);
  const std::vector<Assignment> bad{{0, 2}};
  CHECK_THROWS_AS(chow_liu(bad, binary_specs(2)), std::out_of_range);
}

TEST_CASE("validate_tree diagnostics") {
  const auto specs = binary_specs(3);
  CHECK_FALSE(validate_tree({specs, {{0, 1}, {1, 2}}}));
  CHECK(validate_tree({specs, {{0, 1}}}) == "disconnected");
  CHECK(validate_tree({specs, {{0, 1}, {1, 2}, {0, 2}}}) == "cycle");
  CHECK(validate_tree({{}, {}}) == "empty");
  CHECK(validate_tree({specs, {{1, 0}, {1, 2}}}) == "bad edge");
  CHECK(validate_tree({specs, {{0, 3}, {1, 2}}}) == "bad edge");
  CHECK(validate_tree({specs, {{0, 1}, {0, 1}}}) == "duplicate edge");
  auto one_state = specs;
  one_state[1].arity = 1;
  CHECK(validate_tree({one_state, {{0, 1}, {1, 2}}}) == "bad arity");
  CHECK_FALSE(validate_tree({binary_specs(1), {}}));
}

TEST_CASE("structure text round trip") {
  Rng rng(5);
  const auto g = random_tree(rng, 6, 4);
  std::stringstream text;
  write_structure(text, *g);
  std::stringstream with_comments;
  with_comments << "# comment\n\n" << text.str();
  const auto back = read_structure(with_comments);
  REQUIRE(back.variables.size() == g->variables.size());
  for (std::size_t v = 0; v < g->variables.size(); ++v) {
    CHECK(back.variables[v].name == g->variables[v].name);
    CHECK(back.variables[v].arity == g->variables[v].arity);
    CHECK(back.variables[v].role == g->variables[v].role);
  }
  CHECK(back.edges == g->edges);
  CHECK(back.label_index() == g->label_index());

  StructureGraph spaced{{{"a b", 2, Role::Label}}, {}};
  std::ostringstream sink;
  CHECK_THROWS_AS(write_structure(sink, spaced), std::invalid_argument);
}

TEST_CASE("label_index requires exactly one label") {
  StructureGraph g{binary_specs(3), {}};
  CHECK(g.label_index() == 2);
  g.variables[0].role = Role::Label;
  CHECK_THROWS_AS(g.label_index(), std::invalid_argument);
  g.variables[0].role = g.variables[2].role = Role::Feature;
  CHECK_THROWS_AS(g.label_index(), std::invalid_argument);
}
