#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "sasdp/queries.hpp"
#include "sasdp/random.hpp"

using namespace sasdp;

namespace {

Dataset make_dataset(const std::vector<double>& values) {
  Dataset ds;
  ds.fields = {"v"};
  for (double v : values) ds.rows.push_back({v});
  return ds;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("csv ingestion") {
  SECTION("happy path with CRLF and padding") {
    std::istringstream in("age, income\r\n30,1000\n41 ,2000.5\r\n");
    const Dataset ds = read_csv(in);
    REQUIRE(ds.fields == std::vector<std::string>{"age", "income"});
    REQUIRE(ds.n() == 2);
    CHECK(ds.rows[1][1] == 2000.5);
    CHECK(ds.field_index("income") == 1);
    CHECK_THROWS_AS(ds.field_index("eyes"), std::invalid_argument);
  }
  SECTION("missing header") {
    std::istringstream in("");
    CHECK_THROWS_WITH(read_csv(in), Catch::Matchers::ContainsSubstring("header"));
  }
  SECTION("field count mismatch names the row") {
    std::istringstream in("a,b\n1,2\n3\n");
    CHECK_THROWS_WITH(read_csv(in), Catch::Matchers::ContainsSubstring("row 3"));
  }
  SECTION("non-numeric value names row and field") {
    std::istringstream in("a,b\n1,fast\n");
    CHECK_THROWS_WITH(read_csv(in),
                      Catch::Matchers::ContainsSubstring("row 2") &&
                          Catch::Matchers::ContainsSubstring("'b'"));
  }
  SECTION("missing values are hard errors") {
    std::istringstream in("a,b\n1,\n");
    CHECK_THROWS_WITH(read_csv(in), Catch::Matchers::ContainsSubstring("missing value"));
  }
  SECTION("duplicate and empty header names rejected") {
    std::istringstream in1("a,a\n1,2\n");
    CHECK_THROWS_AS(read_csv(in1), std::runtime_error);
    std::istringstream in2("a,\n1,2\n");
    CHECK_THROWS_AS(read_csv(in2), std::runtime_error);
  }
  SECTION("non-finite values rejected") {
    std::istringstream in("a\ninf\n");
    CHECK_THROWS_AS(read_csv(in), std::runtime_error);
  }
}

TEST_CASE("query evaluation") {
  SECTION("count") {
    const auto ds = make_dataset({1, 2, 3, 4, 5, 6, 7});
    const auto r = evaluate(ds, BoundedQuery::count());
    REQUIRE(r.values.size() == 1);
    CHECK(r.values[0] == 7.0);
    CHECK(r.lower_bounds[0] == 0.0);
    CHECK(r.upper_bounds[0] == 1e9);
  }
  SECTION("clipped mean in range") {
    const auto ds = make_dataset({2, 4, 6});
    const auto r = evaluate(ds, BoundedQuery::clipped_mean("v", 0.0, 10.0));
    CHECK(r.values[0] == 4.0);
    CHECK(r.lower_bounds[0] == 0.0);
    CHECK(r.upper_bounds[0] == 10.0);
  }
  SECTION("clipping forced") {
    const auto ds = make_dataset({-5, 15});
    const auto r = evaluate(ds, BoundedQuery::clipped_mean("v", 0.0, 10.0));
    CHECK(r.values[0] == 5.0);
  }
  SECTION("clipped mean on empty dataset") {
    const auto ds = make_dataset({});
    CHECK_THROWS_AS(evaluate(ds, BoundedQuery::clipped_mean("v", 0.0, 1.0)),
                    std::invalid_argument);
  }
  SECTION("missing field") {
    const auto ds = make_dataset({1.0});
    CHECK_THROWS_AS(evaluate(ds, BoundedQuery::clipped_mean("w", 0.0, 1.0)),
                    std::invalid_argument);
  }
  SECTION("histogram") {
    const auto ds = make_dataset({0.5, 1.5, 1.7, 2.5, 3.0, 9.0, -1.0});
    const auto q = BoundedQuery::histogram("v", {0.0, 1.0, 2.0, 3.0});
    REQUIRE(q.output_dim() == 3);
    const auto r = evaluate(ds, q);
    CHECK(r.values == std::vector<double>{1.0, 2.0, 2.0});  // 3.0 lands in the closed last bin
    CHECK(r.upper_bounds == std::vector<double>(3, 7.0));
  }
  SECTION("count over the cap") {
    const auto ds = make_dataset({1, 2, 3});
    CHECK_THROWS_AS(evaluate(ds, BoundedQuery::count(2.0)), std::invalid_argument);
  }
  SECTION("query validation") {
    CHECK_THROWS_AS(BoundedQuery::clipped_mean("v", 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(BoundedQuery::histogram("v", {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(BoundedQuery::histogram("v", {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(BoundedQuery::count(0.0), std::invalid_argument);
  }
}

TEST_CASE("neighbors") {
  SECTION("single record leaves one empty neighbor") {
    const auto nbs = neighbors(make_dataset({42.0}));
    REQUIRE(nbs.size() == 1);
    CHECK(nbs[0].n() == 0);
  }
  SECTION("three records leave three pairs") {
    const auto ds = make_dataset({1.0, 2.0, 3.0});
    const auto nbs = neighbors(ds);
    REQUIRE(nbs.size() == 3);
    for (const auto& nb : nbs) CHECK(nb.n() == 2);
    CHECK(nbs[1].rows == std::vector<std::vector<double>>{{1.0}, {3.0}});
  }
  SECTION("reinserting record k restores the original") {
    const auto ds = make_dataset({1.0, 2.0, 3.0, 4.0});
    const auto nbs = neighbors(ds);
    for (std::size_t k = 0; k < nbs.size(); ++k) {
      Dataset restored = nbs[k];
      restored.rows.insert(restored.rows.begin() + static_cast<std::ptrdiff_t>(k),
                           ds.rows[k]);
      CHECK(restored.rows == ds.rows);
    }
  }
  CHECK_THROWS_AS(neighbors(make_dataset({})), std::invalid_argument);
}

TEST_CASE("global sensitivity") {
  for (double p : {1.0, 2.0, kInf}) {
    CHECK(global_sensitivity(BoundedQuery::count(), 10, p) == 1.0);
    CHECK(global_sensitivity(BoundedQuery::histogram("v", {0.0, 1.0, 2.0}), 10, p) == 1.0);
  }
  CHECK(global_sensitivity(BoundedQuery::clipped_mean("v", 0.0, 1.0), 10, 1.0) == 0.1);
  CHECK(global_sensitivity(BoundedQuery::clipped_mean("v", -2.0, 2.0), 8, kInf) == 0.5);
  CHECK_THROWS_AS(global_sensitivity(BoundedQuery::clipped_mean("v", 0.0, 1.0), 1, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(global_sensitivity(BoundedQuery::count(), 10, 0.5), std::invalid_argument);
}

TEST_CASE("empirical sensitivity") {
  SECTION("count is always one") {
    CHECK(empirical_sensitivity(make_dataset({5.0, 5.0}), BoundedQuery::count(), 1.0) == 1.0);
  }
  SECTION("extremal dataset saturates the clipped-mean bound") {
    for (std::size_t n : {2, 5, 20}) {
      std::vector<double> values(n, 0.0);
      values[0] = 1.0;
      const auto ds = make_dataset(values);
      const auto q = BoundedQuery::clipped_mean("v", 0.0, 1.0);
      CHECK(empirical_sensitivity(ds, q, 1.0) ==
            Catch::Approx(global_sensitivity(q, n, 1.0)).epsilon(1e-12));
    }
  }
  SECTION("uniform dataset has zero mean sensitivity") {
    const auto ds = make_dataset({3.0, 3.0, 3.0});
    CHECK(empirical_sensitivity(ds, BoundedQuery::clipped_mean("v", 0.0, 10.0), 1.0) == 0.0);
  }
  SECTION("n = 1 rejected for the mean") {
    CHECK_THROWS_AS(empirical_sensitivity(make_dataset({1.0}),
                                          BoundedQuery::clipped_mean("v", 0.0, 1.0), 1.0),
                    std::invalid_argument);
  }
}

TEST_CASE("dominance and bounds honesty over random datasets") {
  RandomStream stream(8, 99);
  const auto queries = std::vector<BoundedQuery>{
      BoundedQuery::count(),
      BoundedQuery::clipped_mean("v", -1.0, 1.0),
      BoundedQuery::histogram("v", {-2.0, -1.0, 0.0, 1.0, 2.0}),
  };
  for (const auto& q : queries) {
    for (int rep = 0; rep < 200; ++rep) {
      const std::size_t n = 2 + stream.next_u64() % 49;
      std::vector<double> values(n);
      for (auto& v : values) v = 6.0 * (stream.next_uniform_open01() - 0.5);
      const auto ds = make_dataset(values);

      const auto result = evaluate(ds, q);
      for (std::size_t i = 0; i < result.values.size(); ++i) {
        REQUIRE(result.values[i] >= result.lower_bounds[i]);
        REQUIRE(result.values[i] <= result.upper_bounds[i]);
      }
      const double emp = empirical_sensitivity(ds, q, 1.0);
      const double glob = global_sensitivity(q, n, 1.0);
      REQUIRE(emp <= glob + 1e-12);
    }
  }
  SECTION("histogram equality is achievable") {
    const auto q = BoundedQuery::histogram("v", {0.0, 1.0});
    CHECK(empirical_sensitivity(make_dataset({0.5, 0.5}), q, 1.0) ==
          global_sensitivity(q, 2, 1.0));
  }
}
