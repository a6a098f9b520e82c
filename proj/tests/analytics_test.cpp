#include <doctest.h>

#include <cmath>

#include "crowdalloc/analytics.hpp"
#include "crowdalloc/error.hpp"

using namespace crowdalloc;

namespace {

bool near(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol;
}

// The 3(+2) success probability written out as an explicit polynomial, an
// independent route to the same number.
double dyn32_polynomial(double p) {
  return p * p * p *
         (10.0 * (1.0 - p) * (1.0 - p) + 5.0 * p * (1.0 - p) + p * p);
}

}  // namespace

TEST_CASE("pm_fixed basics") {
  CHECK(pm_fixed(3, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pm_fixed(5, 1.0) == 1.0);
  CHECK(near(pm_fixed(5, 0.7), 0.83692));
  CHECK(pm_fixed(1, 0.3) == doctest::Approx(0.3));
  CHECK_THROWS_AS(pm_fixed(4, 0.5), Error);
  CHECK_THROWS_AS(pm_fixed(0, 0.5), Error);
  CHECK_THROWS_AS(pm_fixed(3, 1.5), Error);
}

TEST_CASE("pm_dynamic matches the hand-derived 3(+2) polynomial") {
  Scheme dyn = Scheme::dynamic(3, 2);
  for (int i = 0; i <= 100; ++i) {
    double p = i / 100.0;
    CHECK(near(pm_dynamic(dyn, p), dyn32_polynomial(p)));
  }
  CHECK(near(pm_dynamic(dyn, 0.7), 0.83692));
  CHECK(near(pm_dynamic(Scheme::dynamic(2, 3), 0.5), 0.5));
  CHECK_THROWS_AS(pm_dynamic(Scheme::fixed(3), 0.5), Error);
}

TEST_CASE("equivalence of trad5 and dyn3+2 on the percent grid") {
  Scheme trad5 = Scheme::fixed(5);
  Scheme dyn = Scheme::dynamic(3, 2);
  for (int i = 0; i <= 100; ++i) {
    double p = i / 100.0;
    double fixed5 = pm_fixed(5, p);
    double dynamic = pm_dynamic(dyn, p);
    CHECK(near(fixed5, dynamic));
    CHECK(near(fixed5, enumerate_scheme(trad5, p)));
    CHECK(near(dynamic, enumerate_scheme(dyn, p)));
  }
}

TEST_CASE("enumeration oracle") {
  SUBCASE("spot values") {
    CHECK(near(enumerate_scheme(Scheme::fixed(1), 0.3), 0.3));
    // 0.7^3 + 3 * 0.7^2 * 0.3
    CHECK(near(enumerate_scheme(Scheme::fixed(3), 0.7), 0.784));
    CHECK(enumerate_scheme(Scheme::dynamic(2, 1), 1.0) == 1.0);
  }
  SUBCASE("agreement with closed forms") {
    const double ps[] = {0.3, 0.5, 0.7, 0.9};
    for (int k : {1, 3, 5, 7})
      for (double p : ps)
        CHECK(near(pm_fixed(k, p), enumerate_scheme(Scheme::fixed(k), p)));
    for (Scheme s : {Scheme::dynamic(3, 2), Scheme::dynamic(2, 1),
                     Scheme::dynamic(2, 3)})
      for (double p : ps) CHECK(near(pm_dynamic(s, p), enumerate_scheme(s, p)));
  }
  SUBCASE("agreement for every dynamic shape up to the enumeration bound") {
    for (int n = 2; n <= 6; ++n)
      for (int m = 1; m <= 5; ++m) {
        Scheme s = Scheme::dynamic(n, m);
        for (int i = 0; i <= 20; ++i)
          CHECK(near(pm_dynamic(s, i / 20.0), enumerate_scheme(s, i / 20.0)));
      }
  }
  SUBCASE("probability conservation") {
    for (Scheme s : {Scheme::fixed(1), Scheme::fixed(7), Scheme::dynamic(2, 1),
                     Scheme::dynamic(3, 2), Scheme::dynamic(4, 3)})
      for (double p : {0.0, 0.2, 0.5, 0.8, 1.0})
        CHECK(near(enumerate_total_weight(s, p), 1.0));
  }
  SUBCASE("enumeration bound") {
    CHECK_THROWS_AS(enumerate_scheme(Scheme::fixed(21), 0.5), Error);
    CHECK_NOTHROW(enumerate_scheme(Scheme::dynamic(10, 10), 0.5));
  }
}

TEST_CASE("P_M is nondecreasing in p and fair at p = 1/2") {
  for (Scheme s : {Scheme::fixed(1), Scheme::fixed(3), Scheme::fixed(5),
                   Scheme::fixed(7), Scheme::dynamic(3, 2),
                   Scheme::dynamic(2, 1), Scheme::dynamic(2, 3)}) {
    double prev = 0.0;
    for (int i = 0; i <= 100; ++i) {
      double value = pm(s, i / 100.0);
      CHECK(value >= prev - 1e-12);
      prev = value;
    }
    CHECK(near(pm(s, 0.5), 0.5));
    CHECK(near(pm(s, 0.0), 0.0));
    CHECK(near(pm(s, 1.0), 1.0));
  }
}

TEST_CASE("expected tasks") {
  CHECK(expected_tasks(Scheme::fixed(5), std::nullopt, std::nullopt, 1000) ==
        5000.0);
  SUBCASE("the 4058-task / 18.84% savings arithmetic") {
    double tasks =
        expected_tasks(Scheme::dynamic(3, 2), std::nullopt, 0.471, 1000);
    CHECK(tasks == 4058.0);
    CHECK((5000.0 - tasks) / 5000.0 == 0.1884);
  }
  CHECK(expected_tasks(Scheme::dynamic(3, 2), 1.0, std::nullopt, 1000) ==
        3000.0);
  CHECK_THROWS_AS(expected_tasks(Scheme::dynamic(3, 2), 0.7, 0.471, 1000),
                  Error);
  CHECK_THROWS_AS(
      expected_tasks(Scheme::dynamic(3, 2), std::nullopt, std::nullopt, 1000),
      Error);
  // u = p^n + (1-p)^n under the binary model
  double p = 0.7;
  double u = std::pow(p, 3) + std::pow(1 - p, 3);
  CHECK(near(expected_tasks(Scheme::dynamic(3, 2), p, std::nullopt, 100),
             expected_tasks(Scheme::dynamic(3, 2), std::nullopt, u, 100)));
}

TEST_CASE("curve emission") {
  std::vector<Scheme> schemes = {Scheme::fixed(5), Scheme::dynamic(3, 2)};
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(i / 100.0);
  auto rows = curve(schemes, grid);
  REQUIRE(rows.size() == 202);
  for (size_t i = 0; i < 101; ++i) {
    CHECK(rows[i].scheme == "trad5");
    CHECK(rows[i + 101].scheme == "dyn3+2");
    CHECK(near(rows[i].pm, rows[i + 101].pm));
    CHECK(rows[i].expected_tasks_per_item == 5.0);
    CHECK(rows[i + 101].expected_tasks_per_item <= 5.0);
  }
  CHECK(rows[0].pm == 0.0);
  CHECK(rows[100].pm == 1.0);
  std::string csv = curve_csv(rows);
  CHECK(csv.find("p,scheme,P_M,expected_tasks_per_item\n") == 0);
  std::vector<double> bad = {1.5};
  CHECK_THROWS_AS(curve(schemes, bad), Error);
}

TEST_CASE("scheme names and invariants") {
  CHECK(Scheme::from_name("trad7") == Scheme::fixed(7));
  CHECK(Scheme::from_name("dyn3+2") == Scheme::dynamic(3, 2));
  CHECK(Scheme::fixed(5).name() == "trad5");
  CHECK(Scheme::dynamic(2, 3).name() == "dyn2+3");
  CHECK(Scheme::dynamic(2, 3).max_workers() == 5);
  CHECK_THROWS_AS(Scheme::from_name("trad2"), Error);  // even jury
  CHECK_THROWS_AS(Scheme::from_name("dyn1+2"), Error);
  CHECK_THROWS_AS(Scheme::from_name("dyn3+0"), Error);
  CHECK_THROWS_AS(Scheme::from_name("magic"), Error);
}
