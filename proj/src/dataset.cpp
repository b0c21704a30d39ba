#include "rcef/dataset.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "rcef/config.hpp"

namespace rcef {

namespace {

std::optional<std::int64_t> as_integer(const std::string& s) {
  std::int64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::optional<double> as_real(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  if (quoted) throw std::runtime_error("unterminated quote in CSV line");
  cells.push_back(std::move(cell));
  return cells;
}

std::string escape_token(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '%') out += "%25";
    else if (c == ' ') out += "%20";
    else if (c == '\t') out += "%09";
    else out += c;
  }
  return out.empty() ? "%" : out;
}

std::string unescape_token(const std::string& s) {
  if (s == "%") return {};
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      out += static_cast<char>(std::stoi(s.substr(i + 1, 2), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

}  // namespace

void check_rows(const Dataset& data) {
  for (const auto& row : data.rows) {
    if (row.size() != data.specs.size()) throw std::out_of_range("row width does not match variable count");
    for (std::size_t v = 0; v < row.size(); ++v) {
      if (row[v] < 0 || row[v] >= data.specs[v].arity) throw std::out_of_range("value outside arity of " + data.specs[v].name);
    }
  }
}

std::size_t RawTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::invalid_argument("column '" + name + "' not found");
  return static_cast<std::size_t>(it - header.begin());
}

RawTable read_csv(std::istream& in) {
  RawTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("CSV is empty");
  table.header = split_csv_line(line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != table.header.size())
      throw std::runtime_error("CSV line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                               " cells, expected " + std::to_string(table.header.size()));
    table.rows.push_back(std::move(cells));
  }
  return table;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  for (std::size_t v = 0; v < data.specs.size(); ++v) out << (v ? "," : "") << data.specs[v].name;
  out << '\n';
  for (const auto& row : data.rows) {
    for (std::size_t v = 0; v < row.size(); ++v) out << (v ? "," : "") << row[v];
    out << '\n';
  }
}

int DiscretizationMap::apply(std::size_t column, double value) const {
  const auto& b = boundaries.at(column);
  return static_cast<int>(std::lower_bound(b.begin(), b.end(), value) - b.begin());
}

DiscretizationMap build_discretizer(std::span<const std::vector<double>> columns, int bins) {
  if (bins < 2) throw std::invalid_argument("need at least 2 bins");
  DiscretizationMap map;
  for (const auto& column : columns) {
    if (column.empty()) throw std::invalid_argument("discretizer needs a nonempty holdout");
    std::vector<double> sorted = column;
    std::sort(sorted.begin(), sorted.end());
    const auto n = sorted.size();
    const auto ubins = static_cast<std::size_t>(bins);
    std::vector<double> b;
    for (std::size_t i = 1; i < ubins; ++i) {
      const std::size_t rank = (i * n + ubins - 1) / ubins;  // ceil(i n / bins), 1-based
      const double q = sorted[std::max<std::size_t>(rank, 1) - 1];
      if (q >= sorted.back()) break;
      if (b.empty() || q > b.back()) b.push_back(q);
    }
    map.boundaries.push_back(std::move(b));
  }
  return map;
}

bool is_missing(const std::string& cell) { return cell.empty() || cell == "?" || cell == "NA"; }

int ColumnEncoding::arity() const {
  const int base = kind == Kind::Categorical ? static_cast<int>(levels.size()) : static_cast<int>(boundaries.size()) + 1;
  return base + (has_missing ? 1 : 0);
}

int ColumnEncoding::encode(const std::string& cell) const {
  if (is_missing(cell)) {
    if (!has_missing) throw std::out_of_range("missing value in column '" + name + "' without a missing state");
    return arity() - 1;
  }
  if (kind == Kind::Categorical) {
    const auto it = std::find(levels.begin(), levels.end(), cell);
    if (it == levels.end()) throw std::out_of_range("unknown level '" + cell + "' in column '" + name + "'");
    return static_cast<int>(it - levels.begin());
  }
  const auto v = as_real(cell);
  if (!v) throw std::out_of_range("non-numeric value '" + cell + "' in column '" + name + "'");
  return static_cast<int>(std::lower_bound(boundaries.begin(), boundaries.end(), *v) - boundaries.begin());
}

DataEncoder::DataEncoder(const RawTable& table, std::span<const std::vector<std::string>> holdout,
                         const EncoderOptions& options)
    : label_(options.label) {
  if (holdout.empty()) throw std::invalid_argument("encoder needs a nonempty holdout");
  const auto label_col = table.column(options.label);
  auto listed = [](const std::vector<std::string>& names, const std::string& n) {
    return std::find(names.begin(), names.end(), n) != names.end();
  };

  for (std::size_t c = 0; c < table.header.size(); ++c) {
    ColumnEncoding col;
    col.name = table.header[c];
    bool all_int = true;
    bool all_real = true;
    std::set<std::string> distinct;
    for (const auto& row : table.rows) {
      const auto& cell = row[c];
      if (is_missing(cell)) {
        col.has_missing = true;
        continue;
      }
      distinct.insert(cell);
      if (all_int && !as_integer(cell)) all_int = false;
      if (all_real && !as_real(cell)) all_real = false;
    }

    bool numeric = false;
    if (c == label_col || listed(options.categorical, col.name)) {
      numeric = false;
    } else if (listed(options.numeric, col.name)) {
      if (!all_real) throw std::invalid_argument("column '" + col.name + "' declared numeric but has non-numeric cells");
      numeric = true;
    } else {
      numeric = all_real && !(all_int && distinct.size() <= static_cast<std::size_t>(options.max_discrete_levels));
    }

    if (numeric) {
      col.kind = ColumnEncoding::Kind::Numeric;
      std::vector<double> values;
      for (const auto& row : holdout) {
        if (!is_missing(row[c])) values.push_back(*as_real(row[c]));
      }
      if (!values.empty()) {
        const std::vector<std::vector<double>> one{std::move(values)};
        col.boundaries = build_discretizer(one, options.bins).boundaries.front();
      }
    } else {
      col.kind = ColumnEncoding::Kind::Categorical;
      col.levels.assign(distinct.begin(), distinct.end());
      if (all_int) {
        std::sort(col.levels.begin(), col.levels.end(),
                  [](const std::string& a, const std::string& b) { return *as_integer(a) < *as_integer(b); });
      }
    }

    if (col.arity() < 2) {
      if (c == label_col) throw std::invalid_argument("label column has a single value");
      continue;
    }
    columns_.push_back(std::move(col));
  }
}

std::vector<VariableSpec> DataEncoder::specs() const {
  std::vector<VariableSpec> out;
  for (const auto& c : columns_) out.push_back({c.name, c.arity(), c.name == label_ ? Role::Label : Role::Feature});
  return out;
}

std::vector<Assignment> DataEncoder::encode(const std::vector<std::string>& header,
                                            std::span<const std::vector<std::string>> rows) const {
  std::vector<std::size_t> source;
  for (const auto& c : columns_) {
    const auto it = std::find(header.begin(), header.end(), c.name);
    if (it == header.end()) throw std::invalid_argument("column '" + c.name + "' not found");
    source.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  std::vector<Assignment> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    Assignment x(columns_.size());
    for (std::size_t v = 0; v < columns_.size(); ++v) x[v] = columns_[v].encode(row.at(source[v]));
    out.push_back(std::move(x));
  }
  return out;
}

void DataEncoder::write(std::ostream& out) const {
  out << "# label " << escape_token(label_) << '\n';
  for (const auto& c : columns_) {
    out << "# column " << escape_token(c.name) << ' '
        << (c.kind == ColumnEncoding::Kind::Numeric ? "numeric" : "categorical") << ' ' << (c.has_missing ? 1 : 0);
    if (c.kind == ColumnEncoding::Kind::Numeric) {
      for (double b : c.boundaries) out << ' ' << format_double(b);
    } else {
      for (const auto& l : c.levels) out << ' ' << escape_token(l);
    }
    out << '\n';
  }
}

DataEncoder DataEncoder::read(std::istream& in) {
  DataEncoder enc;
  std::string line;
  bool have_label = false;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string hash, tag;
    if (!(fields >> hash >> tag) || hash != "#") continue;
    if (tag == "label") {
      std::string name;
      fields >> name;
      enc.label_ = unescape_token(name);
      have_label = true;
    } else if (tag == "column") {
      ColumnEncoding c;
      std::string name, kind;
      int missing = 0;
      if (!(fields >> name >> kind >> missing)) throw std::runtime_error("malformed column line: " + line);
      c.name = unescape_token(name);
      c.has_missing = missing != 0;
      if (kind == "numeric") {
        c.kind = ColumnEncoding::Kind::Numeric;
        for (std::string tok; fields >> tok;) c.boundaries.push_back(parse_double(c.name, tok));
      } else if (kind == "categorical") {
        for (std::string tok; fields >> tok;) c.levels.push_back(unescape_token(tok));
      } else {
        throw std::runtime_error("unknown column kind '" + kind + "'");
      }
      enc.columns_.push_back(std::move(c));
    }
  }
  if (!have_label) throw std::runtime_error("structure file has no label line");
  return enc;
}

}  // namespace rcef
