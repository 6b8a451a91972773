#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>

#include "expcorr/data_table.hpp"
#include "expcorr/error.hpp"
#include "oracles.hpp"

using namespace expcorr;

namespace {

DataTable parse(const std::string& text, LoadOptions options = {}) {
  std::istringstream in(text);
  return load_table(in, options);
}

}  // namespace

TEST_CASE("load_table reads a plain numeric table") {
  LoadOptions options;
  options.missing_code = 0.0;
  const DataTable t = parse("1,2\n3,4\n", options);
  CHECK(t.items() == 2);
  CHECK(t.participants() == 2);
  CHECK(t.is_complete());
  CHECK(t.value(0, 1) == 2.0);
  CHECK(t.value(1, 0) == 3.0);
}

TEST_CASE("load_table marks the numeric missing code absent") {
  LoadOptions options;
  options.missing_code = 0.0;
  const DataTable t = parse("1,0\n3,4\n", options);
  CHECK_FALSE(t.present(0, 1));
  CHECK(t.present(0, 0));
  CHECK(t.present_count() == 3);
}

TEST_CASE("load_table treats NA, empty fields and a custom token as missing") {
  const DataTable t = parse("1,NA,3\n4,,6\n7,8,9\n");
  CHECK_FALSE(t.present(0, 1));
  CHECK_FALSE(t.present(1, 1));
  CHECK(t.present_count() == 7);
  LoadOptions options;
  options.missing_token = ".";
  const DataTable u = parse("1,.,3\n4,5,6\n", options);
  CHECK_FALSE(u.present(0, 1));
  CHECK_THROWS_AS(parse("1,.,3\n4,5,6\n"), DataError);
}

TEST_CASE("load_table detects delimiters, headers and labels") {
  const DataTable tabbed = parse("1\t2\t3\n4\t5\t6\n");
  CHECK(tabbed.participants() == 3);
  const DataTable semi = parse("1;2\n3;4\n");
  CHECK(semi.participants() == 2);
  const DataTable spaced = parse("1 2  3\n4   5 6\n");
  CHECK(spaced.participants() == 3);

  const DataTable labeled = parse("item,p1,p2\ncat,1,2\ndog,3,5\n");
  CHECK(labeled.items() == 2);
  CHECK(labeled.participants() == 2);
  CHECK(labeled.item_labels() == std::vector<std::string>{"cat", "dog"});
  CHECK(labeled.participant_labels() == std::vector<std::string>{"p1", "p2"});
  CHECK(labeled.value(1, 1) == 5.0);

  LoadOptions no_header;
  no_header.header = Detect::no;
  no_header.row_labels = Detect::no;
  CHECK_THROWS_AS(parse("a,b\n1,2\n3,4\n", no_header), DataError);
}

TEST_CASE("load_table strips a UTF-8 byte order mark") {
  const DataTable t = parse("\xEF\xBB\xBF" "1,2\n3,4\n");
  CHECK(t.value(0, 0) == 1.0);
}

TEST_CASE("load_table errors name the problem") {
  CHECK_THROWS_WITH_AS(parse("1,2\n3\n"), doctest::Contains("ragged"), DataError);
  CHECK_THROWS_WITH_AS(parse("1,2\n3,x4\n"), doctest::Contains("non-numeric"), DataError);
  CHECK_THROWS_WITH_AS(parse("1,2,3\nNA,NA,NA\n4,5,6\n"), doctest::Contains("item row 2"), DataError);
  CHECK_THROWS_WITH_AS(parse("1,NA\n2,NA\n"), doctest::Contains("participant column 2"), DataError);
  CHECK_THROWS_AS(parse("1,2,3\n"), DataError);
  CHECK_THROWS_AS(parse("1\n2\n3\n"), DataError);
  CHECK_THROWS_AS(parse(""), DataError);
  CHECK_THROWS_AS(parse("1,inf\n2,3\n"), DataError);
}

TEST_CASE("from_rows validates its input") {
  const std::vector<double> v{1, 2, 3, 4};
  const bool all[] = {true, true, true, true};
  const bool dead_row[] = {false, false, true, true};
  CHECK_NOTHROW(DataTable::from_rows(2, 2, v, all));
  CHECK_THROWS_AS(DataTable::from_rows(2, 2, v, dead_row), DataError);
  CHECK_THROWS_AS(DataTable::from_rows(1, 4, v, all), DataError);
  CHECK_THROWS_AS(DataTable::from_rows(2, 2, v, all, {"only one"}), DataError);
  const std::vector<double> bad{1, NAN, 3, 4};
  CHECK_THROWS_AS(DataTable::complete(2, 2, bad), DataError);
}

TEST_CASE("write then load is the identity on values and mask") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> z(500.0, 120.0);
  std::bernoulli_distribution drop(0.1);
  const std::size_t m = 17, n = 9;
  std::vector<double> values(m * n);
  std::unique_ptr<bool[]> present(new bool[m * n]);
  for (std::size_t k = 0; k < m * n; ++k) {
    values[k] = z(gen);
    present[k] = k % n == k / n % n || !drop(gen);  // keeps every row and column alive
  }
  const DataTable t = DataTable::from_rows(m, n, values, std::span<const bool>(present.get(), m * n));
  for (char delimiter : {',', '\t', ';'}) {
    std::ostringstream out;
    write_table(out, t, delimiter);
    const DataTable back = parse(out.str());
    CHECK(back == t);
  }

  std::vector<std::string> items(m), people(n);
  for (std::size_t i = 0; i < m; ++i) items[i] = "w" + std::to_string(i);
  for (std::size_t j = 0; j < n; ++j) people[j] = "s" + std::to_string(j);
  const DataTable labeled =
      DataTable::from_rows(m, n, values, std::span<const bool>(present.get(), m * n), items, people);
  std::ostringstream out;
  write_table(out, labeled);
  CHECK(parse(out.str()) == labeled);
}

TEST_CASE("format_real round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 1e-7}) {
    CHECK(parse_real(format_real(v)).value() == v);
  }
  CHECK_FALSE(parse_real("nan").has_value());
  CHECK_FALSE(parse_real("1.5x").has_value());
  CHECK(parse_real(" 2.5 ").has_value() == false);
}

TEST_CASE("item_means fixed values") {
  const DataTable t = DataTable::complete(2, 2, std::vector<double>{1, 2, 2, 5});
  const ItemMeans im = item_means(t);
  CHECK(im.means == std::vector<double>{1.5, 3.5});
  CHECK(im.counts == std::vector<std::size_t>{2, 2});

  const std::vector<double> v{1, 99, 3, 4};
  const bool present[] = {true, false, true, true};
  const ItemMeans partial = item_means(DataTable::from_rows(2, 2, v, present));
  CHECK(partial.means == std::vector<double>{1.0, 3.5});
  CHECK(partial.counts == std::vector<std::size_t>{1, 2});
}

TEST_CASE("item_means equals a naive row-average oracle") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::bernoulli_distribution keep(0.85);
  const std::size_t m = 100, n = 10;
  std::vector<double> values(m * n);
  std::unique_ptr<bool[]> present(new bool[m * n]);
  for (std::size_t k = 0; k < m * n; ++k) {
    values[k] = u(gen);
    present[k] = k % n == 0 || (k / n == 0) || keep(gen);
  }
  const std::span<const bool> mask(present.get(), m * n);
  const DataTable t = DataTable::from_rows(m, n, values, mask);
  const auto expected = oracle::row_means(values, mask, m, n);
  const auto got = item_means(t).means;
  for (std::size_t i = 0; i < m; ++i) CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-14));
}

TEST_CASE("item_means is invariant to column permutation") {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> z;
  const std::size_t m = 30, n = 12;
  std::vector<double> values(m * n);
  for (auto& v : values) v = z(gen);
  const DataTable t = DataTable::complete(m, n, values);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), gen);
  const auto a = item_means(t).means;
  const auto b = item_means(t.with_columns(order)).means;
  for (std::size_t i = 0; i < m; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
}

TEST_CASE("pearson_r fixed values and degenerate input") {
  const std::vector<double> x{1, 2, 4, 8, 9};
  const std::vector<double> y{2, 1, 5, 7, 11};
  CHECK(pearson_r(x, x) == doctest::Approx(1.0).epsilon(1e-15));
  std::vector<double> neg(x.size());
  std::transform(x.begin(), x.end(), neg.begin(), [](double v) { return -3.0 * v + 7.0; });
  CHECK(pearson_r(x, neg) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(std::abs(pearson_r(x, y) - oracle::pearson(x, y)) <= 1e-12);
  const std::vector<double> flat{3, 3, 3, 3, 3};
  CHECK_THROWS_AS(pearson_r(x, flat), DegenerateError);
  CHECK_THROWS_AS(pearson_r(std::vector<double>{1, 2}, std::vector<double>{2, 1}), Error);
}

TEST_CASE("pearson_r symmetry, bound and affine invariance") {
  std::mt19937_64 gen(21);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> x(25), y(25);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = z(gen);
      y[i] = 0.4 * x[i] + z(gen);
    }
    const double r = pearson_r(x, y);
    CHECK(std::abs(r) <= 1.0);
    CHECK(r == doctest::Approx(pearson_r(y, x)).epsilon(1e-15));
    std::vector<double> ax(x.size());
    std::transform(x.begin(), x.end(), ax.begin(), [](double v) { return 2.5 * v + 1000.0; });
    CHECK(std::abs(pearson_r(ax, y) - r) <= 1e-12);
  }
}
