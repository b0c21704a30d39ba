#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rcef/graph.hpp"

namespace rcef {

using BigInt = boost::multiprecision::cpp_int;

/// Exact nonnegative fraction. Not kept in lowest terms; equality is by
/// cross-multiplication.
struct Rational {
  BigInt num = 0;
  BigInt den = 1;

  Rational() = default;
  Rational(BigInt n, BigInt d);

  double to_double() const;

  friend bool operator==(const Rational& a, const Rational& b) { return a.num * b.den == b.num * a.den; }
  friend Rational operator+(const Rational& a, const Rational& b) {
    return {a.num * b.den + b.num * a.den, a.den * b.den};
  }
};

std::string to_string(const Rational& r);

/// log2 of a positive big integer, accurate to double precision.
double log2_big(const BigInt& x);

/// Per-edge start offsets into the parameter vector; offsets[e] is the first
/// index of edge e's block, blocks are laid out in edge order.
std::vector<std::size_t> edge_offsets(const StructureGraph& g);

/// d = sum over edges (s,t) of arity(s) * arity(t).
std::size_t model_dimension(const StructureGraph& g);

/// Largest word size accepted for integer parameters.
inline constexpr int kMaxWordSize = 16;

/// Integer parameter vector over the edge cliques of a tree. Entry
/// offsets[e] + a * arity(t) + b weighs state (x_s = a, x_t = b) of edge e.
class IntParams {
 public:
  IntParams(std::shared_ptr<const StructureGraph> structure, int k);
  IntParams(std::shared_ptr<const StructureGraph> structure, int k, std::vector<std::int64_t> theta);

  const StructureGraph& structure() const { return *structure_; }
  const std::shared_ptr<const StructureGraph>& structure_ptr() const { return structure_; }
  int k() const { return k_; }
  std::int64_t max_value() const { return (std::int64_t{1} << k_) - 1; }
  std::size_t dimension() const { return theta_.size(); }
  const std::vector<std::size_t>& offsets() const { return offsets_; }

  const std::vector<std::int64_t>& theta() const { return theta_; }
  std::int64_t operator[](std::size_t j) const { return theta_[j]; }

  /// Replaces the vector; throws if the length or any bound is wrong.
  void set_theta(std::vector<std::int64_t> theta);

  /// Parameter of edge e at state (a, b), where a indexes the smaller vertex.
  std::int64_t edge_param(std::size_t e, int a, int b) const {
    return theta_[offsets_[e] + static_cast<std::size_t>(a * structure_->arity(structure_->edges[e].t) + b)];
  }

 private:
  std::shared_ptr<const StructureGraph> structure_;
  int k_;
  std::vector<std::size_t> offsets_;
  std::vector<std::int64_t> theta_;
};

/// Sparse one-hot sufficient statistic: one active index per edge.
struct SufficientStatistic {
  std::vector<std::size_t> indices;
};

/// Integer sufficient statistic counts plus the number of samples.
struct DataSummary {
  std::vector<BigInt> counts;
  BigInt n = 0;

  DataSummary() = default;
  explicit DataSummary(std::size_t d) : counts(d, 0) {}

  std::size_t dimension() const { return counts.size(); }
  friend bool operator==(const DataSummary&, const DataSummary&) = default;
};

/// Throws unless every edge block of `summary` sums to n.
void check_summary(const StructureGraph& g, const DataSummary& summary);

SufficientStatistic phi(const Assignment& x, const StructureGraph& g);

/// Validates that x is a full assignment within every arity.
void check_assignment(const Assignment& x, const StructureGraph& g);

std::int64_t score(const IntParams& params, const Assignment& x);

/// Z = sum over all x of 2^score(x), computed by leaf-to-root elimination.
BigInt partition(const IntParams& params);

/// P(x) = 2^score(x) / Z as an exact fraction.
Rational density(const IntParams& params, const Assignment& x);

/// log2 Z - <theta, counts> / n, evaluated in floating point. Diagnostic only.
double neg_avg_log_likelihood(const IntParams& params, const DataSummary& summary);

}  // namespace rcef
