#include <doctest.h>

#include "generators.hpp"
#include "rcef/inference.hpp"

using namespace rcef;
using namespace rcef::testing;

namespace {

std::int64_t best_enumerated_score(const IntParams& p, const Evidence& ev) {
  std::int64_t best = -1;
  for_each_assignment(p.structure(), ev, [&](const Assignment& x) { best = std::max(best, score(p, x)); });
  return best;
}

}  // namespace

TEST_CASE("uniform model on one edge") {
  const IntParams p(single_edge(2, 2), 3);
  const auto m = sum_product(p, Evidence{});
  CHECK(m.z == 4);
  for (std::size_t v = 0; v < 2; ++v)
    for (int s = 0; s < 2; ++s) CHECK(m.vertex(v, s) == Rational(1, 2));
  for (std::size_t j = 0; j < 4; ++j) CHECK(m.edge(0, j) == Rational(1, 4));
}

TEST_CASE("diagonal model on one edge") {
  const IntParams p(single_edge(2, 2), 3, {1, 0, 0, 1});
  for (const auto& m : {sum_product(p, Evidence{}), brute_force(p, Evidence{})}) {
    CHECK(m.edge(0, 0) == Rational(2, 6));
    CHECK(m.edge(0, 1) == Rational(1, 6));
    CHECK(m.edge(0, 2) == Rational(1, 6));
    CHECK(m.edge(0, 3) == Rational(2, 6));
  }
}

TEST_CASE("sum_product equals enumeration on random trees") {
  Rng rng(101);
  for (int trial = 0; trial < 150; ++trial) {
    const auto g = random_tree(rng, uniform_int(rng, 1, 6), 4);
    const auto p = random_params(rng, g, uniform_int(rng, 1, 4));
    const auto ev = random_evidence(rng, *g, 0.3);
    const auto fast = sum_product(p, ev);
    const auto slow = brute_force(p, ev);
    CHECK(fast.z == slow.z);
    CHECK(same_marginals(fast, slow));
  }
}

TEST_CASE("marginals are normalized and consistent") {
  Rng rng(102);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_tree(rng, uniform_int(rng, 2, 7), 4);
    const auto p = random_params(rng, g, 3);
    const auto ev = random_evidence(rng, *g, 0.2);
    const auto m = sum_product(p, ev);
    for (std::size_t v = 0; v < g->num_vertices(); ++v) {
      BigInt total = 0;
      for (const auto& w : m.vertex_weight[v]) total += w;
      CHECK(total == m.z);
    }
    for (std::size_t e = 0; e < g->edges.size(); ++e) {
      const auto [s, t] = g->edges[e];
      const auto cols = static_cast<std::size_t>(g->arity(t));
      for (int a = 0; a < g->arity(s); ++a) {
        BigInt row = 0;
        for (std::size_t b = 0; b < cols; ++b) row += m.edge_weight[e][static_cast<std::size_t>(a) * cols + b];
        CHECK(row == m.vertex_weight[s][static_cast<std::size_t>(a)]);
      }
      for (std::size_t b = 0; b < cols; ++b) {
        BigInt col = 0;
        for (int a = 0; a < g->arity(s); ++a) col += m.edge_weight[e][static_cast<std::size_t>(a) * cols + b];
        CHECK(col == m.vertex_weight[t][b]);
      }
    }
  }
}

TEST_CASE("shifting one edge block scales z and keeps marginals") {
  Rng rng(103);
  for (int trial = 0; trial < 60; ++trial) {
    const auto g = random_tree(rng, uniform_int(rng, 2, 6), 4);
    const int k = 4;
    auto theta = random_theta(rng, *g, 3);  // headroom for the shift
    const IntParams before(g, k, theta);
    const auto e = uniform_index(rng, g->edges.size());
    const auto c = uniform_int(rng, 1, 8);
    const auto offset = edge_offsets(*g)[e];
    const auto width = static_cast<std::size_t>(g->arity(g->edges[e].s) * g->arity(g->edges[e].t));
    for (std::size_t j = 0; j < width; ++j) theta[offset + j] += c;
    const IntParams after(g, k, theta);
    const auto ev = random_evidence(rng, *g, 0.3);
    const auto m0 = sum_product(before, ev);
    const auto m1 = sum_product(after, ev);
    CHECK(m1.z == m0.z << c);
    CHECK(same_marginals(m0, m1));
    CHECK(map_assignment(before, ev) == map_assignment(after, ev));
  }
}

TEST_CASE("fully clamped evidence gives point marginals") {
  const auto g = chain({2, 3, 2});
  const IntParams p(g, 3, {1, 2, 3, 4, 5, 6, 7, 0, 1, 2, 3, 4});
  Evidence ev;
  ev.clamp(0, 1);
  ev.clamp(1, 2);
  ev.clamp(2, 0);
  const auto m = sum_product(p, ev);
  CHECK(m.z == BigInt(1) << static_cast<unsigned>(score(p, {1, 2, 0})));
  CHECK(m.vertex(0, 1) == Rational(1, 1));
  CHECK(m.vertex(1, 0) == Rational(0, 1));
  CHECK(m.vertex(2, 0) == Rational(1, 1));
  CHECK(same_marginals(m, brute_force(p, ev)));
}

TEST_CASE("brute force oracle") {
  const auto g = chain({2, 3, 4});
  Evidence ev;
  ev.clamp(1, 2);
  const auto m = brute_force(IntParams(g, 3), ev);
  CHECK(m.z == 8);
  for (int s = 0; s < 2; ++s) CHECK(m.vertex(0, s) == Rational(1, 2));
  for (int s = 0; s < 4; ++s) CHECK(m.vertex(2, s) == Rational(1, 4));
  CHECK(m.vertex(1, 2) == Rational(1, 1));

  Rng rng(104);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = random_params(rng, random_tree(rng, 5, 4), 3);
    CHECK(brute_force(p, Evidence{}).z == partition(p));
  }

  const auto wide = chain(std::vector<int>(11, 4));
  CHECK_THROWS_AS(brute_force(IntParams(wide, 2), Evidence{}), std::length_error);
  Evidence most;
  for (std::size_t v = 0; v < 5; ++v) most.clamp(v, 0);
  CHECK_NOTHROW(brute_force(IntParams(wide, 2), most));
}

TEST_CASE("evidence validation") {
  const IntParams p(single_edge(2, 2), 3);
  Evidence out_of_range;
  out_of_range.clamp(0, 2);
  CHECK_THROWS_AS(sum_product(p, out_of_range), std::out_of_range);
  Evidence unknown;
  unknown.clamp(5, 0);
  CHECK_THROWS_AS(sum_product(p, unknown), std::out_of_range);
  const auto ev = Evidence::all_but({1, 0}, 1);
  CHECK(ev.state(0) == 1);
  CHECK_FALSE(ev.state(1));
}

TEST_CASE("map assignment") {
  CHECK(map_assignment(IntParams(chain({3, 2, 4}), 3), Evidence{}) == Assignment{0, 0, 0});
  Evidence ev;
  ev.clamp(0, 1);
  CHECK(map_assignment(IntParams(single_edge(2, 2), 3, {1, 0, 0, 3}), ev) == Assignment{1, 1});
}

TEST_CASE("map assignment attains the enumerated maximum") {
  Rng rng(105);
  for (int trial = 0; trial < 150; ++trial) {
    const auto g = random_tree(rng, uniform_int(rng, 1, 6), 4);
    const auto p = random_params(rng, g, uniform_int(rng, 1, 4));
    const auto ev = random_evidence(rng, *g, 0.3);
    const auto x = map_assignment(p, ev);
    for (std::size_t v = 0; v < x.size(); ++v) CHECK(ev.allows(v, x[v]));
    CHECK(score(p, x) == best_enumerated_score(p, ev));
  }
}

TEST_CASE("map ties resolve to the lowest root state first") {
  // Both (0,1) and (1,0) score 5; the root picks 0, then its child picks 1.
  const IntParams p(single_edge(2, 2), 3, {0, 5, 5, 0});
  CHECK(map_assignment(p, Evidence{}) == Assignment{0, 1});
}

TEST_CASE("rooted tree and enumeration helpers") {
  StructureGraph g{{{"a", 2, Role::Feature}, {"b", 2, Role::Feature}, {"c", 3, Role::Label}}, {{0, 2}, {1, 2}}};
  const RootedTree tree(g);
  CHECK(tree.order == std::vector<std::size_t>{0, 2, 1});
  CHECK(tree.parent[2] == 0);
  CHECK(tree.parent[1] == 2);
  CHECK(tree.parent_edge[1] == 1);
  CHECK(tree.children[2] == std::vector<std::size_t>{1});

  std::size_t count = 0;
  for_each_assignment(g, Evidence{}, [&](const Assignment&) { ++count; });
  CHECK(count == 12);

  StructureGraph cyclic{g.variables, {{0, 1}, {1, 2}, {0, 2}}};
  CHECK_THROWS_AS(RootedTree{cyclic}, std::invalid_argument);

  const auto weights = subtree_weights(IntParams(std::make_shared<const StructureGraph>(g), 3), Evidence{}, tree);
  CHECK(weights[1] == std::vector<BigInt>{1, 1});
  CHECK(weights[2] == std::vector<BigInt>{2, 2, 2});
  CHECK(weights[0] == std::vector<BigInt>{6, 6});
}
