#include <doctest.h>

#include <map>
#include <numeric>
#include <sstream>

#include "generators.hpp"
#include "rcef/dataset.hpp"

using namespace rcef;
using namespace rcef::testing;

namespace {

std::vector<int> recount(const std::vector<double>& column, const DiscretizationMap& map) {
  std::vector<int> counts(static_cast<std::size_t>(map.bin_count(0)), 0);
  for (double v : column) ++counts[static_cast<std::size_t>(map.apply(0, v))];
  return counts;
}

template <typename T>
std::multiset<T> as_multiset(const std::vector<T>& v) {
  return {v.begin(), v.end()};
}

RawTable table_from(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in);
}

}  // namespace

TEST_CASE("quantile discretizer on 1..100") {
  std::vector<double> column(100);
  std::iota(column.begin(), column.end(), 1.0);
  const auto map = build_discretizer(std::vector<std::vector<double>>{column}, 10);
  CHECK(map.boundaries[0] == std::vector<double>{10, 20, 30, 40, 50, 60, 70, 80, 90});
  CHECK(map.apply(0, 55) == 5);
  CHECK(map.apply(0, 10) == 0);
  CHECK(map.apply(0, 10.5) == 1);
  CHECK(map.apply(0, -3) == 0);
  CHECK(map.apply(0, 1000) == 9);
  CHECK(recount(column, map) == std::vector<int>(10, 10));
}

TEST_CASE("constant column collapses to one bin") {
  const auto map = build_discretizer(std::vector<std::vector<double>>{std::vector<double>(50, 4.2)}, 10);
  CHECK(map.boundaries[0].empty());
  CHECK(map.bin_count(0) == 1);
  CHECK(map.apply(0, 4.2) == 0);
  CHECK(map.apply(0, 99) == 0);
}

TEST_CASE("discretizer input checks") {
  CHECK_THROWS_AS(build_discretizer(std::vector<std::vector<double>>{{}}, 10), std::invalid_argument);
  CHECK_THROWS_AS(build_discretizer(std::vector<std::vector<double>>{{1.0}}, 1), std::invalid_argument);
}

TEST_CASE("discretizer bins hold about n/bins points") {
  Rng rng(51);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 500));
    const int bins = uniform_int(rng, 2, 12);
    const bool ties = trial % 2 == 0;
    const int levels = uniform_int(rng, 1, 40);
    std::vector<double> column(n);
    for (auto& v : column) v = ties ? static_cast<double>(uniform_int(rng, 0, levels)) : uniform_unit(rng);
    std::map<double, int> multiplicity;
    for (double v : column) ++multiplicity[v];
    int dup = 0;
    for (const auto& [value, count] : multiplicity) dup = std::max(dup, count - 1);

    const auto map = build_discretizer(std::vector<std::vector<double>>{column}, bins);
    const auto& b = map.boundaries[0];
    CHECK(std::adjacent_find(b.begin(), b.end(), std::greater_equal<>()) == b.end());
    CHECK(map.bin_count(0) <= bins);
    const auto counts = recount(column, map);
    const int lo = static_cast<int>(n) / bins - dup;
    const int hi = static_cast<int>((n + static_cast<std::size_t>(bins) - 1) / static_cast<std::size_t>(bins)) + dup;
    for (int c : counts) {
      CHECK(c >= lo);
      CHECK(c <= hi);
    }
  }
}

TEST_CASE("holdout split") {
  std::vector<int> rows(20);
  std::iota(rows.begin(), rows.end(), 0);
  const std::span<const int> all(rows);

  const auto [none, everything] = split_holdout(all, 0, 1);
  CHECK(none.empty());
  CHECK(everything == rows);

  const auto [big, single] = split_holdout(all, 19, 1);
  CHECK(big.size() == 19);
  CHECK(single.size() == 1);

  const auto a = split_holdout(all, 7, 42);
  const auto b = split_holdout(all, 7, 42);
  CHECK(a == b);
  CHECK(std::is_sorted(a.first.begin(), a.first.end()));
  CHECK(std::is_sorted(a.second.begin(), a.second.end()));
  auto merged = a.first;
  merged.insert(merged.end(), a.second.begin(), a.second.end());
  CHECK(as_multiset(merged) == as_multiset(rows));
  CHECK(split_holdout(all, 7, 43) != a);

  CHECK_THROWS_AS(split_holdout(all, 20, 1), std::invalid_argument);
}

TEST_CASE("horizontal partition") {
  std::vector<int> rows{1, 2, 3, 4};
  const auto one = partition_horizontal(std::span<const int>(rows), 1, 9);
  REQUIRE(one.size() == 1);
  CHECK(as_multiset(one[0]) == as_multiset(rows));

  const auto two = partition_horizontal(std::span<const int>(rows), 2, 9);
  CHECK(two[0].size() == 2);
  CHECK(two[1].size() == 2);
  CHECK_THROWS_AS(partition_horizontal(std::span<const int>(rows), 0, 9), std::invalid_argument);

  Rng rng(52);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> data(static_cast<std::size_t>(uniform_int(rng, 0, 200)));
    for (auto& x : data) x = uniform_int(rng, 0, 9);
    const auto m = static_cast<std::size_t>(uniform_int(rng, 1, 20));
    const auto parts = partition_horizontal(std::span<const int>(data), m, static_cast<std::uint64_t>(trial));
    CHECK(parts.size() == m);
    std::vector<int> merged;
    for (const auto& p : parts) {
      CHECK(p.size() + 1 >= data.size() / m);
      CHECK(p.size() <= data.size() / m + 1);
      merged.insert(merged.end(), p.begin(), p.end());
    }
    CHECK(as_multiset(merged) == as_multiset(data));
  }
}

TEST_CASE("CSV reading") {
  const auto t = table_from("a,b,\"c,d\"\n1,\"x \"\"y\"\"\",3\r\n\n4,,6\n");
  CHECK(t.header == std::vector<std::string>{"a", "b", "c,d"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0] == std::vector<std::string>{"1", "x \"y\"", "3"});
  CHECK(t.rows[1] == std::vector<std::string>{"4", "", "6"});
  CHECK(t.column("c,d") == 2);
  CHECK_THROWS_AS(t.column("z"), std::invalid_argument);
  CHECK_THROWS_AS(table_from(""), std::runtime_error);
  CHECK_THROWS_AS(table_from("a,b\n1\n"), std::runtime_error);
  CHECK_THROWS_AS(table_from("a\n\"open\n"), std::runtime_error);
}

TEST_CASE("encoder infers column kinds") {
  std::ostringstream csv;
  csv << "temp,colour,count,const,y\n";
  for (int i = 0; i < 40; ++i) {
    csv << (i * 0.37) << ',' << (i % 3 == 0 ? "red" : i % 3 == 1 ? "blue" : "?") << ',' << (i % 12) << ",7,"
        << (i % 2 ? "yes" : "no") << '\n';
  }
  const auto table = table_from(csv.str());
  EncoderOptions opt;
  opt.label = "y";
  opt.bins = 4;
  const DataEncoder enc(table, table.rows, opt);
  REQUIRE(enc.columns().size() == 4);  // const dropped
  const auto& temp = enc.columns()[0];
  CHECK(temp.kind == ColumnEncoding::Kind::Numeric);
  CHECK(temp.arity() == 4);
  const auto& colour = enc.columns()[1];
  CHECK(colour.kind == ColumnEncoding::Kind::Categorical);
  CHECK(colour.levels == std::vector<std::string>{"blue", "red"});
  CHECK(colour.has_missing);
  CHECK(colour.arity() == 3);
  CHECK(colour.encode("?") == 2);
  const auto& count = enc.columns()[2];
  CHECK(count.kind == ColumnEncoding::Kind::Categorical);
  CHECK(count.levels.front() == "0");
  CHECK(count.levels[2] == "2");
  CHECK(count.levels.back() == "11");
  const auto specs = enc.specs();
  CHECK(specs.back().role == Role::Label);
  CHECK(specs.back().arity == 2);

  const auto rows = enc.encode(table.header, table.rows);
  CHECK(rows.size() == 40);
  CHECK(rows[0] == Assignment{0, 1, 0, 0});
  CHECK(rows[3] == Assignment{0, 1, 3, 1});
  CHECK_THROWS_AS(colour.encode("green"), std::out_of_range);

  opt.max_discrete_levels = 5;
  const DataEncoder wide(table, table.rows, opt);
  CHECK(wide.columns()[2].kind == ColumnEncoding::Kind::Numeric);
  opt.categorical = {"count"};
  CHECK(DataEncoder(table, table.rows, opt).columns()[2].kind == ColumnEncoding::Kind::Categorical);
  opt.numeric = {"colour"};
  opt.categorical.clear();
  CHECK_THROWS_AS(DataEncoder(table, table.rows, opt), std::invalid_argument);

  EncoderOptions constant_label;
  constant_label.label = "const";
  CHECK_THROWS_AS(DataEncoder(table, table.rows, constant_label), std::invalid_argument);
  EncoderOptions missing_label;
  missing_label.label = "nope";
  CHECK_THROWS_AS(DataEncoder(table, table.rows, missing_label), std::invalid_argument);
}

TEST_CASE("encoder numeric boundaries come from the holdout") {
  std::ostringstream csv;
  csv << "x,y\n";
  for (int i = 1; i <= 100; ++i) csv << i << ".5," << (i % 2) << '\n';
  const auto table = table_from(csv.str());
  const std::vector<std::vector<std::string>> holdout(table.rows.begin(), table.rows.begin() + 10);
  EncoderOptions opt;
  opt.label = "y";
  opt.bins = 2;
  const DataEncoder enc(table, holdout, opt);
  CHECK(enc.columns()[0].boundaries == std::vector<double>{5.5});
  CHECK(enc.columns()[0].encode("99.5") == 1);
  CHECK_THROWS_AS(enc.columns()[0].encode("abc"), std::out_of_range);
  CHECK_THROWS_AS(enc.columns()[0].encode(""), std::out_of_range);
}

TEST_CASE("encoder text round trip") {
  const auto table = table_from("a b,w,y\n1.5,p%q,0\n2.5,,1\n0.5,r s,1\n3.5,p%q,0\n");
  EncoderOptions opt;
  opt.label = "y";
  opt.bins = 2;
  const DataEncoder enc(table, table.rows, opt);
  std::stringstream text;
  enc.write(text);
  text << "name 2 feature\n0 1\n";
  const auto back = DataEncoder::read(text);
  CHECK(back.label() == "y");
  REQUIRE(back.columns().size() == enc.columns().size());
  for (std::size_t c = 0; c < enc.columns().size(); ++c) {
    CHECK(back.columns()[c].name == enc.columns()[c].name);
    CHECK(back.columns()[c].kind == enc.columns()[c].kind);
    CHECK(back.columns()[c].levels == enc.columns()[c].levels);
    CHECK(back.columns()[c].boundaries == enc.columns()[c].boundaries);
    CHECK(back.columns()[c].has_missing == enc.columns()[c].has_missing);
  }
  CHECK(back.encode(table.header, table.rows) == enc.encode(table.header, table.rows));

  std::istringstream no_label("# column x categorical 0 a b\n");
  CHECK_THROWS_AS(DataEncoder::read(no_label), std::runtime_error);
}

TEST_CASE("dataset helpers") {
  Dataset d{{{"a", 2, Role::Feature}, {"y", 3, Role::Label}}, {{0, 2}, {1, 0}}};
  CHECK_NOTHROW(check_rows(d));
  std::ostringstream out;
  write_dataset_csv(out, d);
  CHECK(out.str() == "a,y\n0,2\n1,0\n");
  d.rows.push_back({0, 3});
  CHECK_THROWS_AS(check_rows(d), std::out_of_range);
  d.rows.back() = {0};
  CHECK_THROWS_AS(check_rows(d), std::out_of_range);
  CHECK(is_missing(""));
  CHECK(is_missing("?"));
  CHECK(is_missing("NA"));
  CHECK_FALSE(is_missing("0"));
}
