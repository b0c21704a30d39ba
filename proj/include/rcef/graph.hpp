#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rcef {

enum class Role { Feature, Label };

struct VariableSpec {
  std::string name;
  int arity = 2;
  Role role = Role::Feature;
};

/// An undirected edge, always stored with s < t.
struct Edge {
  std::size_t s = 0;
  std::size_t t = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// A full assignment: one state index per variable.
using Assignment = std::vector<int>;

struct StructureGraph {
  std::vector<VariableSpec> variables;
  std::vector<Edge> edges;

  std::size_t num_vertices() const { return variables.size(); }
  int arity(std::size_t v) const { return variables[v].arity; }

  /// Index of the unique label variable; throws if there is not exactly one.
  std::size_t label_index() const;
};

/// Row-major joint count table of two variables.
struct CountMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint64_t> counts;

  std::uint64_t at(std::size_t i, std::size_t j) const { return counts[i * cols + j]; }
};

/// Plug-in mutual information in bits. Zero cells contribute nothing.
double mutual_information(const CountMatrix& joint);

/// Pairwise joint counts for variables s and t over the given rows.
CountMatrix joint_counts(std::span<const Assignment> rows,
                         const std::vector<VariableSpec>& specs, std::size_t s, std::size_t t);

/// Maximum-weight spanning tree over pairwise mutual information.
///
/// Candidate edges are ordered by (-MI, s, t) and added greedily (Kruskal),
/// so ties resolve to the lexicographically smallest edge.
StructureGraph chow_liu(std::span<const Assignment> holdout, const std::vector<VariableSpec>& specs);

/// Returns std::nullopt for a spanning tree, otherwise the first violated
/// property ("empty", "bad edge", "duplicate edge", "cycle", "disconnected").
std::optional<std::string> validate_tree(const StructureGraph& g);

/// Text format: one `name arity role` line per variable, then one `s t` line
/// per edge. Lines starting with '#' are comments.
void write_structure(std::ostream& out, const StructureGraph& g);
StructureGraph read_structure(std::istream& in);

std::string to_string(Role role);
Role parse_role(const std::string& text);

}  // namespace rcef
