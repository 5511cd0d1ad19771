#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rdio/milp.hpp"
#include "rdio/util.hpp"
#include "test_support.hpp"

using namespace rdio;
using namespace rdio::milp;

TEST_CASE("lp: box optimum") {
  LpModel lp;
  lp.sense = ObjSense::Maximize;
  lp.addVar(0.0, 1.0, 1.0);
  lp.addVar(0.0, 1.0, 1.0);
  const auto sol = solveLp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(2.0));
  CHECK(sol.x[0] == doctest::Approx(1.0));
  CHECK(sol.x[1] == doctest::Approx(1.0));
}

TEST_CASE("lp: contradictory rows are infeasible") {
  LpModel lp;
  lp.addVar(-kInfinity, kInfinity, 0.0);
  lp.addRow({{0, 1.0}}, RowSense::GreaterEqual, 1.0);
  lp.addRow({{0, 1.0}}, RowSense::LessEqual, 0.0);
  CHECK(solveLp(lp).status == LpStatus::Infeasible);
}

TEST_CASE("lp: unbounded direction detected with ray") {
  LpModel lp;
  lp.sense = ObjSense::Maximize;
  lp.addVar(0.0, kInfinity, 1.0);
  const auto sol = solveLp(lp);
  REQUIRE(sol.status == LpStatus::Unbounded);
  REQUIRE(sol.ray.size() == 1);
  CHECK(sol.ray[0] > 0.0);
}

TEST_CASE("lp: equality rows and negative bounds") {
  // min x + y  s.t.  x + y = 1,  x in [-2, 2], y in [-2, 2]
  LpModel lp;
  lp.addVar(-2.0, 2.0, 1.0);
  lp.addVar(-2.0, 2.0, 1.0);
  lp.addRow({{0, 1.0}, {1, 1.0}}, RowSense::Equal, 1.0);
  const auto sol = solveLp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(1.0));
}

TEST_CASE("lp: strong duality on random instances") {
  Rng rng(99);
  int optimalSeen = 0;
  for (int rep = 0; rep < 60; ++rep) {
    const auto lp = testsupport::randomLp(rng, 2 + rep % 4, 3 + rep % 5, rep % 7 == 6);
    const auto sol = solveLp(lp);
    if (sol.status != LpStatus::Optimal) continue;
    ++optimalSeen;
    CHECK(maxViolation(lp, sol.x) <= 1e-8);
    CHECK(dualityGap(lp, sol) <= 1e-7);
  }
  CHECK(optimalSeen >= 40);
}

TEST_CASE("lp: matches the vertex enumeration oracle") {
  Rng rng(1234);
  int checked = 0;
  for (int rep = 0; rep < 60; ++rep) {
    const auto lp = testsupport::randomLp(rng, 2 + rep % 2, 2 + rep % 5, rep % 9 == 8);
    const auto oracle = testsupport::vertexEnumerationOptimum(lp);
    const auto sol = solveLp(lp);
    if (!oracle.has_value()) {
      CHECK(sol.status == LpStatus::Infeasible);
      continue;
    }
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(*oracle).epsilon(1e-7));
    ++checked;
  }
  CHECK(checked >= 40);
}

TEST_CASE("milp: binary toggle picks the better lp") {
  // max x  s.t.  x <= 3 + 4 y, x <= 10; optimum 7 at y = 1
  LpModel lp;
  lp.sense = ObjSense::Maximize;
  lp.addVar(0.0, 10.0, 1.0);
  lp.addVar(0.0, 1.0, 0.0, true);
  lp.addRow({{0, 1.0}, {1, -4.0}}, RowSense::LessEqual, 3.0);
  const auto sol = solveMilp(lp);
  REQUIRE(sol.status == MilpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(7.0));
  CHECK(sol.x[1] == doctest::Approx(1.0));

  const auto brute = bruteForceMilp(lp);
  REQUIRE(brute.status == MilpStatus::Optimal);
  CHECK(brute.objective == doctest::Approx(7.0));
}

TEST_CASE("milp: big-M switching rows") {
  // max z  s.t.  z <= 5 y,  z <= 3 + 2 y  -> optimum 5 at y = 1
  LpModel lp;
  lp.sense = ObjSense::Maximize;
  lp.addVar(0.0, kInfinity, 1.0);
  lp.addVar(0.0, 1.0, 0.0, true);
  lp.addRow({{0, 1.0}, {1, -5.0}}, RowSense::LessEqual, 0.0);
  lp.addRow({{0, 1.0}, {1, -2.0}}, RowSense::LessEqual, 3.0);
  const auto sol = solveMilp(lp);
  REQUIRE(sol.status == MilpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(5.0));
  CHECK(sol.x[1] == doctest::Approx(1.0));
}

TEST_CASE("milp: integral relaxation solves at the root") {
  LpModel lp;
  lp.sense = ObjSense::Maximize;
  lp.addVar(0.0, 1.0, 1.0, true);
  lp.addVar(0.0, 1.0, 2.0, true);
  const auto sol = solveMilp(lp);
  REQUIRE(sol.status == MilpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(3.0));
  CHECK(sol.nodes == 1);
}

TEST_CASE("milp: brute force with zero binaries equals lp") {
  Rng rng(5);
  const auto lp = testsupport::randomLp(rng, 3, 4);
  const auto a = solveLp(lp);
  const auto b = bruteForceMilp(lp);
  REQUIRE(a.status == LpStatus::Optimal);
  REQUIRE(b.status == MilpStatus::Optimal);
  CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-9));
}

TEST_CASE("milp: branch and bound agrees with enumeration on random instances") {
  Rng rng(42);
  int agreements = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const int nBin = 4 + rep % 9;  // up to 12 binaries
    const auto model = testsupport::randomMilp(rng, 2 + rep % 3, nBin, 3 + rep % 4);
    const auto exact = solveMilp(model);
    const auto brute = bruteForceMilp(model);
    REQUIRE(exact.status == brute.status);
    if (exact.status == MilpStatus::Optimal) {
      CHECK(std::fabs(exact.objective - brute.objective) <= 1e-6);
      CHECK(maxViolation(model, exact.x) <= 1e-7);
      ++agreements;
    }
  }
  CHECK(agreements >= 40);
}

TEST_CASE("milp: warm start is honored as an incumbent") {
  LpModel lp;
  lp.sense = ObjSense::Maximize;
  lp.addVar(0.0, 10.0, 1.0);
  lp.addVar(0.0, 1.0, 0.0, true);
  lp.addRow({{0, 1.0}, {1, -4.0}}, RowSense::LessEqual, 3.0);
  SolverOptions opts;
  opts.warmStart = Vec{3.0, 0.0};  // feasible, objective 3
  const auto sol = solveMilp(lp, opts);
  REQUIRE(sol.status == MilpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(7.0));  // still proves the true optimum
}

TEST_CASE("milp: node limit reports the incumbent") {
  // odd knapsack capacity keeps the relaxation fractional, forcing branching
  LpModel lp;
  lp.sense = ObjSense::Maximize;
  std::vector<std::pair<int, double>> row;
  for (int j = 0; j < 5; ++j) {
    lp.addVar(0.0, 1.0, 1.0, true);
    row.push_back({j, 2.0});
  }
  lp.addRow(std::move(row), RowSense::LessEqual, 5.0);
  SolverOptions opts;
  opts.nodeLimit = 1;
  const auto sol = solveMilp(lp, opts);
  CHECK(sol.status == MilpStatus::LimitReached);

  // and without the limit it solves to the true optimum of 2
  const auto full = solveMilp(lp);
  REQUIRE(full.status == MilpStatus::Optimal);
  CHECK(full.objective == doctest::Approx(2.0));
}

TEST_CASE("milp: brute force refuses more than 20 binaries") {
  LpModel lp;
  for (int j = 0; j < 21; ++j) lp.addVar(0.0, 1.0, 1.0, true);
  CHECK_THROWS_AS(bruteForceMilp(lp), InputError);
}

TEST_CASE("lp export carries sections and 17-digit coefficients") {
  LpModel lp;
  lp.sense = ObjSense::Maximize;
  lp.addVar(0.0, 1.0, 1.0 / 3.0, false, "alpha");
  lp.addVar(0.0, 1.0, 1.0, true, "flag");
  lp.addRow({{0, 2.0 / 3.0}, {1, -1.0}}, RowSense::LessEqual, 0.25);
  std::ostringstream out;
  writeLpFormat(lp, out);
  const std::string text = out.str();
  CHECK(text.find("Maximize") != std::string::npos);
  CHECK(text.find("Subject To") != std::string::npos);
  CHECK(text.find("Binaries") != std::string::npos);
  CHECK(text.find("alpha") != std::string::npos);
  CHECK(text.find("0.33333333333333331") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
}
