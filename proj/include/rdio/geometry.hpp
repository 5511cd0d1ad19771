#pragma once

#include <vector>

#include "rdio/model.hpp"

namespace rdio::geometry {

/**
 * Convex hull membership decided by LP feasibility: does x admit convex
 * weights over `points` reproducing it within tol * (1 + max|coordinate|)?
 * No facet enumeration; a feasibility linear program is solved instead.
 */
bool hullMembership(const Point& x, const std::vector<Point>& points, double tol = 1e-7);

/// Distance-style residual of the hull membership LP (0 when x is inside).
double hullResidual(const Point& x, const std::vector<Point>& points);

struct PreferredSolution {
  Point x0;
  Vec weights;  // convex weights over the accepted points reproducing x0
};

/**
 * Minimizer of the objective over the convex hull of the accepted points.
 * Linear objectives scan the vertices (ties to the lowest index); convex
 * quadratic objectives run away-step conditional gradient over the weight
 * simplex to a 1e-6 duality gap (iteration cap 10000).
 */
PreferredSolution preferredSolution(const std::vector<Point>& accepted, const Objective& objective);

/**
 * Tangent half-space to the objective sublevel set at x0:
 * {x : grad f(x0)'x >= grad f(x0)'x0}. Throws NumericalError when the
 * gradient vanishes at x0 (half-space undefined).
 */
Halfspace tangentHalfspace(const Objective& objective, const Point& x0);

/// True when x lies in the x0-sublevel set, i.e. f(x) >= f(x0).
bool sublevelContains(const Objective& objective, const Point& x0, const Point& x);

struct WellPosednessReport {
  std::vector<bool> acceptedFeasibleForKnown;  // per accepted point
  std::vector<bool> rejectedInHull;            // per rejected point
  std::vector<bool> templateFeasible;          // per nonlinear template
  bool overall = false;

  std::string describe() const;
};

/**
 * Executable form of the well-posedness assumption: (a) each template admits
 * parameters keeping all accepted points feasible, (b) accepted points
 * satisfy the known constraints, (c) no rejected point lies in the hull of
 * the accepted points. Failures are reported, never thrown.
 */
WellPosednessReport checkWellPosed(const Dataset& dataset, const Region& known,
                                   const std::vector<NonlinearTemplate>& templates,
                                   double tol = 1e-7);

struct MinimizeResult {
  double value = 0.0;       // objective at the best feasible point found
  double lowerBound = 0.0;  // certified lower bound on the true minimum
  Point x;
  bool boundActive = false;  // artificial bounding box clipped the minimizer
  Vec ray;                   // descent ray when the region is unbounded below
};

/**
 * Minimize a linear or convex quadratic objective over a region (tangent
 * half-space included). Fully linear regions go through the LP; concave
 * nonlinear constraints are handled by outer linearization; quadratic
 * objectives over polytopes by away-step conditional gradient.
 * The search is confined to `box` (pairs of per-coordinate bounds); a
 * minimizer on the box boundary flags `boundActive`.
 */
MinimizeResult minimizeOverRegion(const Region& region, const Objective& objective,
                                  const std::vector<std::pair<double, double>>& box);

/// A default search box: data hull inflated around x0.
std::vector<std::pair<double, double>> defaultSearchBox(const Region& region, const Point& x0);

}  // namespace rdio::geometry
