#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rcef/graph.hpp"
#include "rcef/random.hpp"

namespace rcef {

/// Discrete rows together with the variable metadata they conform to.
struct Dataset {
  std::vector<VariableSpec> specs;
  std::vector<Assignment> rows;
};

/// Throws std::out_of_range for a row that does not fit the specs.
void check_rows(const Dataset& data);

/// Raw CSV contents: a header row and string cells.
struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

/// Comma separated, header first, optional double quotes around cells.
RawTable read_csv(std::istream& in);
void write_dataset_csv(std::ostream& out, const Dataset& data);

/// Sorted, strictly increasing bin boundaries per numerical column.
struct DiscretizationMap {
  std::vector<std::vector<double>> boundaries;

  /// Bins are right-closed: a value lands in the bin indexed by the number
  /// of boundaries strictly below it.
  int apply(std::size_t column, double value) const;
  int bin_count(std::size_t column) const { return static_cast<int>(boundaries.at(column).size()) + 1; }
};

/// Boundaries at the i/bins empirical quantiles (i = 1..bins-1), taking the
/// ceil(i*n/bins)-th smallest value, deduplicated. Boundaries at or above the
/// column maximum are dropped, so a constant column has a single bin.
DiscretizationMap build_discretizer(std::span<const std::vector<double>> columns, int bins = 10);

/// How one CSV column becomes a discrete variable.
struct ColumnEncoding {
  enum class Kind { Categorical, Numeric };

  std::string name;
  Kind kind = Kind::Categorical;
  std::vector<std::string> levels;   // categorical values, in state order
  std::vector<double> boundaries;    // numeric bin boundaries
  bool has_missing = false;          // missing cells map to the last state

  int arity() const;
  int encode(const std::string& cell) const;
};

bool is_missing(const std::string& cell);

struct EncoderOptions {
  std::string label;
  int bins = 10;
  int max_discrete_levels = 20;        // all-integer columns up to this many levels stay categorical
  std::vector<std::string> numeric;    // forced numeric
  std::vector<std::string> categorical;  // forced categorical
};

/// Column encodings for a whole table. Categorical levels come from all rows;
/// numeric boundaries come from `holdout` only. Single-state columns are dropped.
class DataEncoder {
 public:
  DataEncoder() = default;
  DataEncoder(const RawTable& table, std::span<const std::vector<std::string>> holdout, const EncoderOptions& options);

  const std::vector<ColumnEncoding>& columns() const { return columns_; }
  std::vector<VariableSpec> specs() const;

  /// Rows of `table` restricted and encoded in column order.
  std::vector<Assignment> encode(const std::vector<std::string>& header,
                                 std::span<const std::vector<std::string>> rows) const;

  const std::string& label() const { return label_; }

  /// `# label ...` and `# column ...` comment lines; read() skips everything else.
  void write(std::ostream& out) const;
  static DataEncoder read(std::istream& in);

 private:
  std::vector<ColumnEncoding> columns_;
  std::string label_;
};

/// Seeded uniform sample of `holdout_size` rows without replacement. Both
/// parts keep the original row order.
template <typename Row>
std::pair<std::vector<Row>, std::vector<Row>> split_holdout(std::span<const Row> rows, std::size_t holdout_size,
                                                            std::uint64_t seed) {
  if (rows.size() <= holdout_size) throw std::invalid_argument("dataset too small for holdout");
  std::vector<std::size_t> idx(rows.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Rng rng(seed);
  for (std::size_t i = 0; i < holdout_size; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_index(rng, idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  std::vector<bool> in_holdout(rows.size(), false);
  for (std::size_t i = 0; i < holdout_size; ++i) in_holdout[idx[i]] = true;
  std::pair<std::vector<Row>, std::vector<Row>> out;
  out.first.reserve(holdout_size);
  out.second.reserve(rows.size() - holdout_size);
  for (std::size_t i = 0; i < rows.size(); ++i) (in_holdout[i] ? out.first : out.second).push_back(rows[i]);
  return out;
}

/// Seeded shuffle, then row i goes to learner i mod m.
template <typename Row>
std::vector<std::vector<Row>> partition_horizontal(std::span<const Row> rows, std::size_t m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("partition needs at least one learner");
  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  fisher_yates(order, rng);
  std::vector<std::vector<Row>> out(m);
  for (std::size_t i = 0; i < order.size(); ++i) out[i % m].push_back(rows[order[i]]);
  return out;
}

}  // namespace rcef
