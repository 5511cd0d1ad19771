#include <doctest.h>

#include <cmath>

#include "rdio/geometry.hpp"
#include "rdio/util.hpp"

using namespace rdio;
using namespace rdio::geometry;

namespace {

Objective sumOfSquares(std::size_t m) {
  Mat q(m, m);
  for (std::size_t i = 0; i < m; ++i) q(i, i) = 1.0;
  return Objective::quadratic(Vec(m, 0.0), q);
}

}  // namespace

TEST_CASE("hull membership: simplex interior and exterior") {
  const std::vector<Point> tri = {{0, 0}, {1, 0}, {0, 1}};
  CHECK(hullMembership({0.5, 0.5}, tri));
  CHECK_FALSE(hullMembership({2, 2}, tri));
}

TEST_CASE("hull membership: the mean is always inside") {
  Rng rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<Point> pts;
    Point mean(3, 0.0);
    const int n = rng.uniformInt(2, 8);
    for (int k = 0; k < n; ++k) {
      Point p(3);
      for (auto& v : p) v = rng.uniform(-5.0, 5.0);
      for (int j = 0; j < 3; ++j) mean[j] += p[j] / n;
      pts.push_back(p);
    }
    CHECK(hullMembership(mean, pts));
  }
}

TEST_CASE("hull membership: segment midpoint with an off-segment third point") {
  const std::vector<Point> pts = {{0, 0}, {2, 0}, {1, 3}};
  CHECK(hullMembership({1, 0}, pts));
}

TEST_CASE("hull membership: every input point belongs to its own hull") {
  Rng rng(23);
  std::vector<Point> pts;
  for (int k = 0; k < 7; ++k) {
    Point p(4);
    for (auto& v : p) v = rng.uniform(0.0, 40.0);
    pts.push_back(p);
  }
  for (const auto& p : pts) CHECK(hullMembership(p, pts));
}

TEST_CASE("hull membership input validation") {
  CHECK_THROWS_AS(hullMembership({1.0}, {}), InputError);
  CHECK_THROWS_AS(hullMembership({1.0, 2.0}, {{1.0}}), InputError);
}

TEST_CASE("preferred solution: linear objective scans vertices") {
  const std::vector<Point> pts = {{1, 2}, {3, 1}, {2, 0}};
  const auto ps = preferredSolution(pts, Objective::linear({1, 0}));
  CHECK(ps.x0 == Point{1, 2});
}

TEST_CASE("preferred solution: lowest index wins ties") {
  const std::vector<Point> pts = {{0, 0}, {1, 0}};
  const auto ps = preferredSolution(pts, Objective::linear({0, 1}));
  CHECK(ps.x0 == Point{0, 0});
}

TEST_CASE("preferred solution: quadratic on collinear points") {
  const std::vector<Point> pts = {{2, 0}, {1, 1}, {0, 2}};
  const auto ps = preferredSolution(pts, sumOfSquares(2));
  CHECK(ps.x0[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(ps.x0[1] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("preferred solution: quadratic matches a dense grid search") {
  Rng rng(314);
  const auto obj = sumOfSquares(2);
  for (int rep = 0; rep < 5; ++rep) {
    // random triangle pushed away from the origin
    std::vector<Point> tri;
    for (int k = 0; k < 3; ++k) {
      tri.push_back({rng.uniform(1.0, 5.0), rng.uniform(1.0, 5.0)});
    }
    const auto ps = preferredSolution(tri, obj);
    // independent oracle: dense grid over the weight simplex
    double best = 1e300;
    const int H = 160;
    for (int i = 0; i <= H; ++i) {
      for (int j = 0; j + i <= H; ++j) {
        const double w0 = double(i) / H, w1 = double(j) / H, w2 = 1.0 - w0 - w1;
        Point x = {w0 * tri[0][0] + w1 * tri[1][0] + w2 * tri[2][0],
                   w0 * tri[0][1] + w1 * tri[1][1] + w2 * tri[2][1]};
        best = std::min(best, obj.value(x));
      }
    }
    CHECK(obj.value(ps.x0) <= best + 1e-4);
    CHECK(hullMembership(ps.x0, tri, 1e-6));
    // returned weights reproduce x0
    Point recon(2, 0.0);
    for (std::size_t k = 0; k < tri.size(); ++k) {
      recon[0] += ps.weights[k] * tri[k][0];
      recon[1] += ps.weights[k] * tri[k][1];
    }
    CHECK(recon[0] == doctest::Approx(ps.x0[0]).epsilon(1e-9));
    CHECK(recon[1] == doctest::Approx(ps.x0[1]).epsilon(1e-9));
  }
}

TEST_CASE("preferred solution dominates every accepted point") {
  Rng rng(98);
  std::vector<Point> pts;
  for (int k = 0; k < 9; ++k) pts.push_back({rng.uniform(0.0, 6.0), rng.uniform(0.0, 6.0), rng.uniform(0.0, 6.0)});
  const auto obj = sumOfSquares(3);
  const auto ps = preferredSolution(pts, obj);
  CHECK(hullMembership(ps.x0, pts, 1e-6));
  for (const auto& p : pts) CHECK(obj.value(ps.x0) <= obj.value(p) + 1e-9);
}

TEST_CASE("tangent half-space at a quadratic minimum boundary point") {
  const auto hs = tangentHalfspace(sumOfSquares(2), {1, 1});
  CHECK(hs.normal == Vec{2, 2});
  CHECK(hs.offset == doctest::Approx(4.0));
  // x0 on the boundary exactly
  CHECK(linalg::dot(hs.normal, Vec{1, 1}) == doctest::Approx(hs.offset));
}

TEST_CASE("tangent half-space for linear objectives is the sublevel set") {
  const auto obj = Objective::linear({1, -1});
  const Point x0 = {2.0, 0.5};
  const auto hs = tangentHalfspace(obj, x0);
  CHECK(hs.normal == Vec{1, -1});
  CHECK(hs.offset == doctest::Approx(1.5));

  Rng rng(55);
  for (int rep = 0; rep < 1000; ++rep) {
    const Point x = {rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)};
    CHECK(hs.contains(x, 1e-12) == sublevelContains(obj, x0, x));
  }
}

TEST_CASE("tangent half-space rejects a vanishing gradient") {
  CHECK_THROWS_AS(tangentHalfspace(sumOfSquares(2), {0, 0}), NumericalError);
}

TEST_CASE("sublevel membership") {
  const auto obj = sumOfSquares(2);
  CHECK(sublevelContains(obj, {1, 1}, {2, 0}));
  CHECK_FALSE(sublevelContains(obj, {1, 1}, {0.5, 0.5}));
  CHECK(sublevelContains(obj, {1, 1}, {1, 1}));
}

TEST_CASE("accepted points always satisfy the tangent half-space") {
  Rng rng(321);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<Point> pts;
    for (int k = 0; k < 8; ++k) pts.push_back({rng.uniform(0.5, 6.0), rng.uniform(0.5, 6.0)});
    const auto obj = sumOfSquares(2);
    const auto ps = preferredSolution(pts, obj);
    const auto hs = tangentHalfspace(obj, ps.x0);
    for (const auto& p : pts) {
      CHECK(hs.contains(p, 1e-6 * membershipScale(p)));
      CHECK(sublevelContains(obj, ps.x0, p));
    }
  }
}

TEST_CASE("well-posedness: clean dataset passes") {
  Dataset ds;
  ds.observations = {{{1, 1}, Label::Accepted}, {{5, 5}, Label::Rejected}};
  Region known;
  known.knownLinear = {{{1, 0}, 0.0}, {{0, 1}, 0.0}};  // nonnegativity
  const auto report = checkWellPosed(ds, known, {});
  CHECK(report.overall);
  CHECK(report.acceptedFeasibleForKnown == std::vector<bool>{true});
  CHECK(report.rejectedInHull == std::vector<bool>{false});
}

TEST_CASE("well-posedness: rejected point equal to an accepted point") {
  Dataset ds;
  ds.observations = {{{1, 1}, Label::Accepted}, {{2, 2}, Label::Accepted}, {{1, 1}, Label::Rejected}};
  const auto report = checkWellPosed(ds, Region{}, {});
  CHECK_FALSE(report.overall);
  CHECK(report.rejectedInHull == std::vector<bool>{true});
}

TEST_CASE("well-posedness: accepted point infeasible for known constraints") {
  Dataset ds;
  ds.observations = {{{-1, 0}, Label::Accepted}};
  Region known;
  known.knownLinear = {{{1, 0}, 0.0}, {{0, 1}, 0.0}};
  const auto report = checkWellPosed(ds, known, {});
  CHECK_FALSE(report.overall);
  CHECK(report.acceptedFeasibleForKnown == std::vector<bool>{false});
}

TEST_CASE("well-posedness: template feasibility over accepted points") {
  Dataset ds;
  ds.observations = {{{1, 0}, Label::Accepted}, {{2, 0}, Label::Accepted}};
  NonlinearTemplate tmpl;
  tmpl.basis = {{BasisFunction::Type::Constant, 0, 0.0},
                {BasisFunction::Type::Coordinate, 0, 0.0}};
  tmpl.lowerBounds = {-10.0, -10.0};
  tmpl.upperBounds = {10.0, 10.0};
  const auto report = checkWellPosed(ds, Region{}, {tmpl});
  CHECK(report.templateFeasible == std::vector<bool>{true});
  CHECK(report.overall);
}

TEST_CASE("minimize over a polytope with a linear objective") {
  Region region;
  region.knownLinear = {{{1, 0}, 0.0}, {{0, 1}, 0.0}, {{1, 1}, 1.0}};  // x,y >= 0, x+y >= 1
  const auto res = minimizeOverRegion(region, Objective::linear({1, 1}), {{-10, 10}, {-10, 10}});
  CHECK(res.value == doctest::Approx(1.0));
  CHECK_FALSE(res.boundActive);
}

TEST_CASE("minimize flags descent out of the search box") {
  Region region;
  region.knownLinear = {{{0, 1}, 0.0}};  // only y >= 0; x unbounded below
  const auto res = minimizeOverRegion(region, Objective::linear({1, 0}), {{-50, 50}, {-50, 50}});
  CHECK(res.boundActive);
}
