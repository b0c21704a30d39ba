#include "rcef/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rcef {

namespace {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }

  std::vector<std::size_t> parent;
};

}  // namespace

std::size_t StructureGraph::label_index() const {
  std::optional<std::size_t> found;
  for (std::size_t v = 0; v < variables.size(); ++v) {
    if (variables[v].role != Role::Label) continue;
    if (found) throw std::invalid_argument("more than one label variable");
    found = v;
  }
  if (!found) throw std::invalid_argument("no label variable");
  return *found;
}

double mutual_information(const CountMatrix& joint) {
  if (joint.counts.size() != joint.rows * joint.cols)
    throw std::invalid_argument("count matrix shape mismatch");
  std::vector<double> row_sum(joint.rows, 0.0);
  std::vector<double> col_sum(joint.cols, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < joint.rows; ++i) {
    for (std::size_t j = 0; j < joint.cols; ++j) {
      const auto c = static_cast<double>(joint.at(i, j));
      row_sum[i] += c;
      col_sum[j] += c;
      total += c;
    }
  }
  if (total <= 0.0) throw std::invalid_argument("empty counts");

  double mi = 0.0;
  for (std::size_t i = 0; i < joint.rows; ++i) {
    for (std::size_t j = 0; j < joint.cols; ++j) {
      const auto c = static_cast<double>(joint.at(i, j));
      if (c == 0.0) continue;
      // p_ij * log2(p_ij / (p_i p_j)) with counts: c/N * log2(c N / (r_i c_j))
      mi += c / total * std::log2(c * total / (row_sum[i] * col_sum[j]));
    }
  }
  // Rounding can leave a tiny negative value for independent tables.
  return std::max(0.0, mi);
}

CountMatrix joint_counts(std::span<const Assignment> rows, const std::vector<VariableSpec>& specs,
                         std::size_t s, std::size_t t) {
  CountMatrix m;
  m.rows = static_cast<std::size_t>(specs.at(s).arity);
  m.cols = static_cast<std::size_t>(specs.at(t).arity);
  m.counts.assign(m.rows * m.cols, 0);
  for (const auto& row : rows) {
    const int a = row.at(s);
    const int b = row.at(t);
    if (a < 0 || a >= specs[s].arity || b < 0 || b >= specs[t].arity)
      throw std::out_of_range("row value outside declared arity");
    ++m.counts[static_cast<std::size_t>(a) * m.cols + static_cast<std::size_t>(b)];
  }
  return m;
}

StructureGraph chow_liu(std::span<const Assignment> holdout, const std::vector<VariableSpec>& specs) {
  const std::size_t n = specs.size();
  if (n < 2) throw std::invalid_argument("chow_liu needs at least 2 variables");
  if (holdout.empty()) throw std::invalid_argument("chow_liu needs a nonempty holdout");
  for (const auto& row : holdout) {
    if (row.size() != n) throw std::invalid_argument("row width does not match variable count");
  }

  struct Candidate {
    double mi;
    Edge edge;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(n * (n - 1) / 2);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = s + 1; t < n; ++t) {
      candidates.push_back({mutual_information(joint_counts(holdout, specs, s, t)), {s, t}});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.mi != b.mi) return a.mi > b.mi;
    return a.edge < b.edge;
  });

  StructureGraph g;
  g.variables = specs;
  DisjointSets sets(n);
  for (const auto& c : candidates) {
    if (sets.unite(c.edge.s, c.edge.t)) g.edges.push_back(c.edge);
    if (g.edges.size() + 1 == n) break;
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

std::optional<std::string> validate_tree(const StructureGraph& g) {
  const std::size_t n = g.num_vertices();
  if (n == 0) return "empty";
  for (const auto& v : g.variables) {
    if (v.arity < 2) return "bad arity";
  }
  std::set<Edge> seen;
  for (const auto& e : g.edges) {
    if (e.s >= e.t || e.t >= n) return "bad edge";
    if (!seen.insert(e).second) return "duplicate edge";
  }
  DisjointSets sets(n);
  for (const auto& e : g.edges) {
    if (!sets.unite(e.s, e.t)) return "cycle";
  }
  for (std::size_t v = 1; v < n; ++v) {
    if (sets.find(v) != sets.find(0)) return "disconnected";
  }
  return std::nullopt;
}

std::string to_string(Role role) { return role == Role::Label ? "label" : "feature"; }

Role parse_role(const std::string& text) {
  if (text == "label") return Role::Label;
  if (text == "feature") return Role::Feature;
  throw std::invalid_argument("unknown role '" + text + "'");
}

void write_structure(std::ostream& out, const StructureGraph& g) {
  for (const auto& v : g.variables) {
    if (v.name.empty() || v.name.find_first_of(" \t\n#") != std::string::npos)
      throw std::invalid_argument("variable name '" + v.name + "' cannot be written to a structure file");
  }
  for (const auto& v : g.variables) out << v.name << ' ' << v.arity << ' ' << to_string(v.role) << '\n';
  for (const auto& e : g.edges) out << e.s << ' ' << e.t << '\n';
}

StructureGraph read_structure(std::istream& in) {
  StructureGraph g;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    const auto where = " (line " + std::to_string(line_no) + ")";
    if (tokens.size() == 3) {
      if (!g.edges.empty()) throw std::runtime_error("variable after edge list" + where);
      VariableSpec v;
      v.name = tokens[0];
      v.arity = std::stoi(tokens[1]);
      v.role = parse_role(tokens[2]);
      g.variables.push_back(std::move(v));
    } else if (tokens.size() == 2) {
      Edge e{std::stoul(tokens[0]), std::stoul(tokens[1])};
      if (e.s > e.t) std::swap(e.s, e.t);
      g.edges.push_back(e);
    } else {
      throw std::runtime_error("malformed structure line" + where);
    }
  }
  return g;
}

}  // namespace rcef
