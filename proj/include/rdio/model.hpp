#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rdio/linalg.hpp"

namespace rdio {

/// Decision point in feature space (Gy units in the radiotherapy instance).
using Point = Vec;

/// Half-space {x : normal'x >= offset}.
struct Halfspace {
  Vec normal;
  double offset = 0.0;

  bool contains(const Point& x, double slack = 0.0) const;
};

/**
 * Convex objective f(x) = c'x + x'Qx. Linear objectives carry an empty Q.
 * Q must be symmetric with no eigenvalue below -1e-9.
 */
struct Objective {
  enum class Kind { Linear, ConvexQuadratic };

  Kind kind = Kind::Linear;
  Vec c;
  Mat Q;

  static Objective linear(Vec c);
  static Objective quadratic(Vec c, Mat Q);

  std::size_t dimension() const { return c.size(); }
  double value(const Point& x) const;
  Vec gradient(const Point& x) const;

  /// Throws InputError when Q is asymmetric or indefinite beyond tolerance.
  void validate() const;
};

/// Linear constraint a'x >= b.
struct LinearConstraint {
  Vec a;
  double b = 0.0;

  double slack(const Point& x) const;  // a'x - b
};

/**
 * One basis function of a nonlinear constraint template. Non-affine basis
 * functions must be concave so that any admissible parameter vector keeps
 * g(x; q) concave in x.
 */
struct BasisFunction {
  enum class Type {
    Constant,    // 1 (affine)
    Coordinate,  // x_j (affine)
    NegSquare,   // -(x_j - center)^2 (concave)
  };

  Type type = Type::Constant;
  int index = 0;
  double center = 0.0;

  bool affine() const { return type != Type::NegSquare; }
  double eval(const Point& x) const;
  void addGradient(const Point& x, double weight, Vec& grad) const;
};

/**
 * Parametric constraint family g(x; q) = sum_j q_j phi_j(x) >= 0, affine in
 * the parameter vector q. Parameters multiplying concave basis functions are
 * restricted nonnegative; affine basis functions take free-signed parameters
 * within the box.
 */
struct NonlinearTemplate {
  std::vector<BasisFunction> basis;
  Vec lowerBounds;  // effective lower bound is clamped at 0 for concave entries
  Vec upperBounds;

  int paramDim() const { return static_cast<int>(basis.size()); }
  double effectiveLower(int j) const;
  double effectiveUpper(int j) const;
  bool admissible(const Vec& q, double tol = 1e-9) const;
  double eval(const Vec& q, const Point& x) const;
  Vec gradientX(const Vec& q, const Point& x) const;
};

/// g(x; q) with bounds checking on q.
double evalNonlinear(const NonlinearTemplate& tmpl, const Vec& q, const Point& x);

/**
 * A feasible region: known constraints (set X), inferred constraints
 * (set X-tilde) and the optional tangent half-space C.
 */
struct Region {
  std::vector<LinearConstraint> knownLinear;
  std::vector<std::pair<NonlinearTemplate, Vec>> knownNonlinear;
  std::vector<LinearConstraint> inferredLinear;
  std::vector<std::pair<NonlinearTemplate, Vec>> inferredNonlinear;
  std::optional<Halfspace> tangent;

  std::size_t dimension() const;
  bool empty() const;
};

enum class Label { Accepted, Rejected };

struct Observation {
  Point point;
  Label label = Label::Accepted;
};

struct Dataset {
  std::vector<Observation> observations;
  std::vector<std::string> featureNames;

  std::size_t dimension() const;
  std::vector<Point> acceptedPoints() const;
  std::vector<Point> rejectedPoints() const;
  std::size_t acceptedCount() const;
  std::size_t rejectedCount() const;

  /// Throws InputError on inconsistent dimensions or non-finite coordinates.
  void validate() const;
};

/// Relative feasibility scale: tol * (1 + max |coordinate|).
double membershipScale(const Point& x);

/**
 * True when x satisfies every constraint of the region within tol * scale,
 * including the tangent half-space when present.
 */
bool regionContains(const Region& region, const Point& x, double tol = 1e-6);

/// Largest violation over known + inferred constraints (tangent excluded).
double nominalViolation(const Region& region, const Point& x);

/**
 * Nominal set check: all accepted points inside, every rejected point
 * violating some known/inferred constraint. The tangent half-space is not
 * consulted. Rejected points must violate by at least strictEps when given
 * (the inverse model's margin), otherwise by more than the tolerance.
 */
bool isNominal(const Region& region, const Dataset& dataset, double tol = 1e-6,
               double strictEps = 0.0);

/**
 * Imputed set check: nominal, and the objective minimum over the full region
 * (tangent included) matches f(x0) within tol.
 */
bool isImputed(const Region& region, const Dataset& dataset, const Objective& objective,
               const Point& x0, double tol = 1e-6);

}  // namespace rdio
