#include <doctest.h>

#include <cmath>

#include "rdio/geometry.hpp"
#include "rdio/model.hpp"
#include "rdio/util.hpp"

using namespace rdio;

namespace {

NonlinearTemplate affineTemplate2d() {
  NonlinearTemplate tmpl;
  tmpl.basis = {{BasisFunction::Type::Constant, 0, 0.0},
                {BasisFunction::Type::Coordinate, 0, 0.0},
                {BasisFunction::Type::Coordinate, 1, 0.0}};
  tmpl.lowerBounds = {-10, -10, -10};
  tmpl.upperBounds = {10, 10, 10};
  return tmpl;
}

// 6 - (x1-2)^2 - 2 (x2-2)^2 >= 0, the running ellipse example
std::pair<NonlinearTemplate, Vec> ellipseConstraint() {
  NonlinearTemplate tmpl;
  tmpl.basis = {{BasisFunction::Type::NegSquare, 0, 2.0},
                {BasisFunction::Type::NegSquare, 1, 2.0},
                {BasisFunction::Type::Constant, 0, 0.0}};
  tmpl.lowerBounds = {0, 0, -50};
  tmpl.upperBounds = {50, 50, 50};
  return {tmpl, Vec{1.0, 2.0, 6.0}};
}

Objective sumOfSquares2() {
  Mat q(2, 2);
  q(0, 0) = 1.0;
  q(1, 1) = 1.0;
  return Objective::quadratic(Vec(2, 0.0), q);
}

Dataset ellipseDataset() {
  Dataset ds;
  const std::vector<Point> accepted = {{1.6, 1.8}, {2.6, 2.0}, {3.0, 1.0}, {3.5, 2.5},
                                       {2.0, 3.0}, {0.5, 2.2}, {1.5, 1.0}, {1.0, 1.0}};
  const std::vector<Point> rejected = {{2.0, 4.0},  {4.0, 3.5}, {-0.8, 2.0},
                                       {0.5, 3.5},  {3.6, 0.9}, {2.0, -0.4}};
  for (const auto& p : accepted) ds.observations.push_back({p, Label::Accepted});
  for (const auto& p : rejected) ds.observations.push_back({p, Label::Rejected});
  return ds;
}

Region ellipseRegion(bool withTangent) {
  Region region;
  region.knownLinear = {{{-2.0, 3.0}, -4.0}};  // 2 x1 - 3 x2 <= 4
  region.inferredNonlinear = {ellipseConstraint()};
  if (withTangent) {
    region.tangent = geometry::tangentHalfspace(sumOfSquares2(), {1.0, 1.0});
  }
  return region;
}

}  // namespace

TEST_CASE("evalNonlinear: affine basis arithmetic") {
  const auto tmpl = affineTemplate2d();
  CHECK(evalNonlinear(tmpl, {4, 2, -3}, {1, 1}) == doctest::Approx(3.0));
  CHECK(evalNonlinear(tmpl, {0, 0, 0}, {7, -9}) == doctest::Approx(0.0));
}

TEST_CASE("evalNonlinear: shifted ellipse value") {
  NonlinearTemplate tmpl;
  tmpl.basis = {{BasisFunction::Type::NegSquare, 0, 0.0},
                {BasisFunction::Type::NegSquare, 1, 0.0},
                {BasisFunction::Type::Constant, 0, 0.0}};
  tmpl.lowerBounds = {0, 0, -50};
  tmpl.upperBounds = {50, 50, 50};
  CHECK(evalNonlinear(tmpl, {1, 2, 6}, {2, 2}) == doctest::Approx(-6.0));
}

TEST_CASE("evalNonlinear rejects parameters outside the admissible set") {
  auto tmpl = affineTemplate2d();
  CHECK_THROWS_AS(evalNonlinear(tmpl, {100, 0, 0}, {1, 1}), InputError);
  NonlinearTemplate concave;
  concave.basis = {{BasisFunction::Type::NegSquare, 0, 0.0}};
  concave.lowerBounds = {-5};  // sign restriction clamps this to 0
  concave.upperBounds = {5};
  CHECK_THROWS_AS(evalNonlinear(concave, {-1.0}, {1, 1}), InputError);
}

TEST_CASE("admissible parameters keep g concave") {
  Rng rng(2718);
  const auto [tmpl, baseQ] = ellipseConstraint();
  for (int rep = 0; rep < 1000; ++rep) {
    Vec q = {rng.uniform(0.0, 5.0), rng.uniform(0.0, 5.0), rng.uniform(-5.0, 5.0)};
    const Point x = {rng.uniform(-4, 4), rng.uniform(-4, 4)};
    const Point y = {rng.uniform(-4, 4), rng.uniform(-4, 4)};
    const double t = rng.uniform();
    Point mix = {t * x[0] + (1 - t) * y[0], t * x[1] + (1 - t) * y[1]};
    const double lhs = tmpl.eval(q, mix);
    const double rhs = t * tmpl.eval(q, x) + (1 - t) * tmpl.eval(q, y);
    CHECK(lhs >= rhs - 1e-9);
  }
}

TEST_CASE("regionContains: empty region accepts everything") {
  CHECK(regionContains(Region{}, {12.0, -4.0}));
}

TEST_CASE("regionContains: known dose floor") {
  Region region;
  Vec a(14, 0.0);
  a[0] = 1.0;
  region.knownLinear = {{a, 10.0}};  // first feature at least 10 Gy
  Point plan(14, 20.0);
  plan[0] = 9.0;
  CHECK_FALSE(regionContains(region, plan));
  plan[0] = 10.0;
  CHECK(regionContains(region, plan));
}

TEST_CASE("regionContains: boundary point counts as inside") {
  Region region;
  region.knownLinear = {{{1, 1}, 2.0}};
  CHECK(regionContains(region, {1.0, 1.0}));
}

TEST_CASE("isNominal on the ellipse configuration") {
  const auto ds = ellipseDataset();
  CHECK(isNominal(ellipseRegion(false), ds));

  // region containing a rejected point is not nominal
  Region loose;
  loose.knownLinear = {{{1, 0}, -100.0}};
  CHECK_FALSE(isNominal(loose, ds));

  // region excluding an accepted point is not nominal
  Region tight;
  tight.knownLinear = {{{1, 0}, 2.0}};  // x1 >= 2 cuts accepted (1.6, 1.8)
  CHECK_FALSE(isNominal(tight, ds));
}

TEST_CASE("isImputed: the ellipse region needs the tangent half-space") {
  const auto ds = ellipseDataset();
  const auto obj = sumOfSquares2();
  const Point x0 = {1.0, 1.0};
  CHECK_FALSE(isImputed(ellipseRegion(false), ds, obj, x0));
  CHECK(isImputed(ellipseRegion(true), ds, obj, x0));
}

TEST_CASE("isImputed: lp-vertex polytope") {
  // x0 is the unique LP optimum of c'x over the box [1,2]^2
  Region region;
  region.knownLinear = {{{1, 0}, 1.0}, {{0, 1}, 1.0}, {{-1, 0}, -2.0}, {{0, -1}, -2.0}};
  Dataset ds;
  ds.observations = {{{1, 1}, Label::Accepted}, {{1.5, 1.5}, Label::Accepted},
                     {{3, 3}, Label::Rejected}};
  CHECK(isImputed(region, ds, Objective::linear({1, 1}), {1, 1}));
  CHECK_FALSE(isImputed(region, ds, Objective::linear({1, 1}), {1.5, 1.5}));
}

TEST_CASE("isImputed implies isNominal") {
  const auto ds = ellipseDataset();
  const auto region = ellipseRegion(true);
  if (isImputed(region, ds, sumOfSquares2(), {1, 1})) {
    CHECK(isNominal(region, ds));
  }
}

TEST_CASE("appending the tangent to a nominal region makes it imputed") {
  Rng rng(424242);
  const auto obj = sumOfSquares2();
  for (int rep = 0; rep < 8; ++rep) {
    // random axis-aligned nominal box with accepted inside, rejected outside
    const double lo0 = rng.uniform(0.5, 2.0), lo1 = rng.uniform(0.5, 2.0);
    const double hi0 = lo0 + rng.uniform(1.0, 3.0), hi1 = lo1 + rng.uniform(1.0, 3.0);
    Region region;
    region.knownLinear = {{{1, 0}, lo0}, {{0, 1}, lo1}, {{-1, 0}, -hi0}, {{0, -1}, -hi1}};
    Dataset ds;
    std::vector<Point> accepted;
    for (int k = 0; k < 6; ++k) {
      Point p = {rng.uniform(lo0, hi0), rng.uniform(lo1, hi1)};
      accepted.push_back(p);
      ds.observations.push_back({p, Label::Accepted});
    }
    ds.observations.push_back({{hi0 + 1.0, hi1 + 1.0}, Label::Rejected});
    REQUIRE(isNominal(region, ds));
    const auto ps = geometry::preferredSolution(accepted, obj);
    Region withTangent = region;
    withTangent.tangent = geometry::tangentHalfspace(obj, ps.x0);
    CHECK(isImputed(withTangent, ds, obj, ps.x0));
  }
}

TEST_CASE("imputed region stays inside the tangent half-space (sampled)") {
  const auto region = ellipseRegion(true);
  const auto hs = *region.tangent;
  Rng rng(777);
  int inside = 0;
  for (int rep = 0; rep < 5000 && inside < 1000; ++rep) {
    const Point x = {rng.uniform(-2.0, 5.0), rng.uniform(-2.0, 5.0)};
    if (!regionContains(region, x)) continue;
    ++inside;
    CHECK(hs.contains(x, 1e-9 * membershipScale(x)));
  }
  CHECK(inside >= 1000);
}

TEST_CASE("dataset validation") {
  Dataset ds;
  ds.observations = {{{1, 2}, Label::Accepted}, {{1}, Label::Rejected}};
  CHECK_THROWS_AS(ds.validate(), InputError);
}
