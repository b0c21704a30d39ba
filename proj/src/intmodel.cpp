#include "rcef/intmodel.hpp"

#include <cmath>
#include <stdexcept>

#include "rcef/inference.hpp"

namespace rcef {

Rational::Rational(BigInt n, BigInt d) : num(std::move(n)), den(std::move(d)) {
  if (den <= 0) throw std::invalid_argument("rational denominator must be positive");
  if (num < 0) throw std::invalid_argument("rational numerator must be nonnegative");
}

double log2_big(const BigInt& x) {
  if (x <= 0) throw std::domain_error("log2 of a non-positive integer");
  const auto top = boost::multiprecision::msb(x);
  if (top < 53) return std::log2(x.convert_to<double>());
  const auto shift = top - 52;
  const BigInt head = x >> shift;
  return std::log2(head.convert_to<double>()) + static_cast<double>(shift);
}

double Rational::to_double() const {
  if (num == 0) return 0.0;
  return std::exp2(log2_big(num) - log2_big(den));
}

std::string to_string(const Rational& r) { return r.num.str() + "/" + r.den.str(); }

std::vector<std::size_t> edge_offsets(const StructureGraph& g) {
  std::vector<std::size_t> offsets;
  offsets.reserve(g.edges.size());
  std::size_t next = 0;
  for (const auto& e : g.edges) {
    offsets.push_back(next);
    next += static_cast<std::size_t>(g.arity(e.s)) * static_cast<std::size_t>(g.arity(e.t));
  }
  return offsets;
}

std::size_t model_dimension(const StructureGraph& g) {
  std::size_t d = 0;
  for (const auto& e : g.edges) d += static_cast<std::size_t>(g.arity(e.s)) * static_cast<std::size_t>(g.arity(e.t));
  return d;
}

IntParams::IntParams(std::shared_ptr<const StructureGraph> structure, int k)
    : IntParams(structure, k, std::vector<std::int64_t>(structure ? model_dimension(*structure) : 0, 0)) {}

IntParams::IntParams(std::shared_ptr<const StructureGraph> structure, int k, std::vector<std::int64_t> theta)
    : structure_(std::move(structure)), k_(k) {
  if (!structure_) throw std::invalid_argument("IntParams needs a structure");
  if (k_ < 1 || k_ > kMaxWordSize) throw std::invalid_argument("word size k out of range");
  offsets_ = edge_offsets(*structure_);
  set_theta(std::move(theta));
}

void IntParams::set_theta(std::vector<std::int64_t> theta) {
  if (theta.size() != model_dimension(*structure_)) throw std::invalid_argument("parameter vector has wrong length");
  const auto hi = max_value();
  for (auto v : theta) {
    if (v < 0 || v > hi) throw std::out_of_range("parameter outside [0, 2^k - 1]");
  }
  theta_ = std::move(theta);
}

void check_summary(const StructureGraph& g, const DataSummary& summary) {
  if (summary.dimension() != model_dimension(g)) throw std::invalid_argument("summary dimension mismatch");
  const auto offsets = edge_offsets(g);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto width = static_cast<std::size_t>(g.arity(g.edges[e].s) * g.arity(g.edges[e].t));
    BigInt block = 0;
    for (std::size_t j = 0; j < width; ++j) block += summary.counts[offsets[e] + j];
    if (block != summary.n) throw std::logic_error("summary block sum differs from sample count");
  }
}

void check_assignment(const Assignment& x, const StructureGraph& g) {
  if (x.size() != g.num_vertices()) throw std::invalid_argument("assignment has wrong length");
  for (std::size_t v = 0; v < x.size(); ++v) {
    if (x[v] < 0 || x[v] >= g.arity(v)) throw std::out_of_range("state out of range for variable " + g.variables[v].name);
  }
}

SufficientStatistic phi(const Assignment& x, const StructureGraph& g) {
  check_assignment(x, g);
  SufficientStatistic stat;
  stat.indices.reserve(g.edges.size());
  std::size_t offset = 0;
  for (const auto& e : g.edges) {
    const auto cols = static_cast<std::size_t>(g.arity(e.t));
    stat.indices.push_back(offset + static_cast<std::size_t>(x[e.s]) * cols + static_cast<std::size_t>(x[e.t]));
    offset += static_cast<std::size_t>(g.arity(e.s)) * cols;
  }
  return stat;
}

std::int64_t score(const IntParams& params, const Assignment& x) {
  std::int64_t total = 0;
  for (auto j : phi(x, params.structure()).indices) total += params[j];
  return total;
}

BigInt partition(const IntParams& params) { return evidence_partition(params, Evidence{}); }

Rational density(const IntParams& params, const Assignment& x) {
  const auto s = score(params, x);
  return Rational(BigInt(1) << static_cast<unsigned>(s), partition(params));
}

double neg_avg_log_likelihood(const IntParams& params, const DataSummary& summary) {
  if (summary.n == 0) throw std::invalid_argument("empty summary");
  if (summary.dimension() != params.dimension()) throw std::invalid_argument("summary dimension mismatch");
  BigInt inner = 0;
  for (std::size_t j = 0; j < params.dimension(); ++j) inner += summary.counts[j] * params[j];
  // inner / n may be large; split into integer and fractional parts before converting.
  const BigInt whole = inner / summary.n;
  const BigInt rest = inner % summary.n;
  const double mean_score = whole.convert_to<double>() + Rational(rest, summary.n).to_double();
  return log2_big(partition(params)) - mean_score;
}

}  // namespace rcef
