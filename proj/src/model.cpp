#include "rdio/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rdio/geometry.hpp"
#include "rdio/kernels.hpp"
#include "rdio/util.hpp"

namespace rdio {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// parameter box used when a template does not specify one
constexpr double kDefaultParamBound = 100.0;
}  // namespace

bool Halfspace::contains(const Point& x, double slack) const {
  return linalg::dot(normal, x) >= offset - slack;
}

Objective Objective::linear(Vec c) {
  Objective obj;
  obj.kind = Kind::Linear;
  obj.c = std::move(c);
  return obj;
}

Objective Objective::quadratic(Vec c, Mat Q) {
  Objective obj;
  obj.kind = Kind::ConvexQuadratic;
  obj.c = std::move(c);
  obj.Q = std::move(Q);
  obj.validate();
  return obj;
}

double Objective::value(const Point& x) const {
  double v = linalg::dot(c, x);
  if (kind == Kind::ConvexQuadratic && !Q.empty()) {
    v += linalg::dot(x, linalg::matVec(Q, x));
  }
  return v;
}

Vec Objective::gradient(const Point& x) const {
  Vec g = c;
  if (kind == Kind::ConvexQuadratic && !Q.empty()) {
    linalg::axpyInPlace(2.0, linalg::matVec(Q, x), g);
  }
  return g;
}

void Objective::validate() const {
  if (kind == Kind::Linear) {
    if (!Q.empty()) throw InputError("objective: linear kind carries a quadratic term");
    return;
  }
  if (Q.rows != Q.cols || Q.rows != c.size()) {
    throw InputError("objective: quadratic term dimension mismatch");
  }
  if (!linalg::isSymmetric(Q, 1e-9)) throw InputError("objective: Q must be symmetric");
  if (linalg::minSymmetricEigenvalue(Q) < -1e-9) {
    throw InputError("objective: Q has a negative eigenvalue beyond tolerance");
  }
}

double LinearConstraint::slack(const Point& x) const { return linalg::dot(a, x) - b; }

double BasisFunction::eval(const Point& x) const {
  switch (type) {
    case Type::Constant: return 1.0;
    case Type::Coordinate: return x[static_cast<std::size_t>(index)];
    case Type::NegSquare: {
      const double d = x[static_cast<std::size_t>(index)] - center;
      return -d * d;
    }
  }
  return 0.0;
}

void BasisFunction::addGradient(const Point& x, double weight, Vec& grad) const {
  switch (type) {
    case Type::Constant:
      break;
    case Type::Coordinate:
      grad[static_cast<std::size_t>(index)] += weight;
      break;
    case Type::NegSquare:
      grad[static_cast<std::size_t>(index)] += weight * -2.0 * (x[static_cast<std::size_t>(index)] - center);
      break;
  }
}

double NonlinearTemplate::effectiveLower(int j) const {
  const double lo = lowerBounds.empty() ? -kDefaultParamBound : lowerBounds[static_cast<std::size_t>(j)];
  if (!basis[static_cast<std::size_t>(j)].affine()) return std::max(lo, 0.0);
  return lo;
}

double NonlinearTemplate::effectiveUpper(int j) const {
  return upperBounds.empty() ? kDefaultParamBound : upperBounds[static_cast<std::size_t>(j)];
}

bool NonlinearTemplate::admissible(const Vec& q, double tol) const {
  if (static_cast<int>(q.size()) != paramDim()) return false;
  for (int j = 0; j < paramDim(); ++j) {
    const double hi = effectiveUpper(j);
    if (q[static_cast<std::size_t>(j)] < effectiveLower(j) - tol) return false;
    if (q[static_cast<std::size_t>(j)] > hi + tol) return false;
  }
  return true;
}

double NonlinearTemplate::eval(const Vec& q, const Point& x) const {
  double v = 0.0;
  for (int j = 0; j < paramDim(); ++j) {
    v += q[static_cast<std::size_t>(j)] * basis[static_cast<std::size_t>(j)].eval(x);
  }
  return v;
}

Vec NonlinearTemplate::gradientX(const Vec& q, const Point& x) const {
  Vec g(x.size(), 0.0);
  for (int j = 0; j < paramDim(); ++j) {
    basis[static_cast<std::size_t>(j)].addGradient(x, q[static_cast<std::size_t>(j)], g);
  }
  return g;
}

double evalNonlinear(const NonlinearTemplate& tmpl, const Vec& q, const Point& x) {
  if (static_cast<int>(q.size()) != tmpl.paramDim()) {
    throw InputError("evalNonlinear: parameter length mismatch");
  }
  if (!tmpl.admissible(q)) throw InputError("evalNonlinear: parameters outside admissible set");
  return tmpl.eval(q, x);
}

std::size_t Region::dimension() const {
  if (!knownLinear.empty()) return knownLinear.front().a.size();
  if (!inferredLinear.empty()) return inferredLinear.front().a.size();
  if (tangent) return tangent->normal.size();
  return 0;
}

bool Region::empty() const {
  return knownLinear.empty() && knownNonlinear.empty() && inferredLinear.empty() &&
         inferredNonlinear.empty() && !tangent;
}

std::size_t Dataset::dimension() const {
  return observations.empty() ? 0 : observations.front().point.size();
}

std::vector<Point> Dataset::acceptedPoints() const {
  std::vector<Point> out;
  for (const auto& obs : observations) {
    if (obs.label == Label::Accepted) out.push_back(obs.point);
  }
  return out;
}

std::vector<Point> Dataset::rejectedPoints() const {
  std::vector<Point> out;
  for (const auto& obs : observations) {
    if (obs.label == Label::Rejected) out.push_back(obs.point);
  }
  return out;
}

std::size_t Dataset::acceptedCount() const {
  std::size_t n = 0;
  for (const auto& obs : observations) n += obs.label == Label::Accepted;
  return n;
}

std::size_t Dataset::rejectedCount() const {
  std::size_t n = 0;
  for (const auto& obs : observations) n += obs.label == Label::Rejected;
  return n;
}

void Dataset::validate() const {
  const std::size_t m = dimension();
  if (!featureNames.empty() && featureNames.size() != m) {
    throw InputError("dataset: feature name count differs from dimension");
  }
  for (const auto& obs : observations) {
    if (obs.point.size() != m) throw InputError("dataset: inconsistent point dimensions");
    for (double v : obs.point) {
      if (!std::isfinite(v)) throw InputError("dataset: non-finite coordinate");
    }
  }
}

double membershipScale(const Point& x) {
  return 1.0 + kernels::maxAbs(x.data(), x.size());
}

namespace {

// largest violation over known + inferred constraints (tangent ignored)
double worstViolation(const Region& region, const Point& x) {
  double worst = -kInf;
  for (const auto& lc : region.knownLinear) worst = std::max(worst, -lc.slack(x));
  for (const auto& lc : region.inferredLinear) worst = std::max(worst, -lc.slack(x));
  for (const auto& [tmpl, q] : region.knownNonlinear) worst = std::max(worst, -tmpl.eval(q, x));
  for (const auto& [tmpl, q] : region.inferredNonlinear) worst = std::max(worst, -tmpl.eval(q, x));
  return worst;
}

}  // namespace

bool regionContains(const Region& region, const Point& x, double tol) {
  const double slack = tol * membershipScale(x);
  if (worstViolation(region, x) > slack) return false;
  if (region.tangent && !region.tangent->contains(x, slack)) return false;
  return true;
}

double nominalViolation(const Region& region, const Point& x) {
  const double v = worstViolation(region, x);
  return v == -kInf ? 0.0 : v;
}

bool isNominal(const Region& region, const Dataset& dataset, double tol, double strictEps) {
  for (const auto& obs : dataset.observations) {
    const double slack = tol * membershipScale(obs.point);
    const double violation = worstViolation(region, obs.point);
    if (obs.label == Label::Accepted) {
      if (violation > slack) return false;
    } else if (strictEps > 0.0) {
      if (violation < strictEps - slack) return false;
    } else {
      if (violation <= slack) return false;
    }
  }
  return true;
}

bool isImputed(const Region& region, const Dataset& dataset, const Objective& objective,
               const Point& x0, double tol) {
  if (!isNominal(region, dataset, tol)) return false;
  const auto box = geometry::defaultSearchBox(region, x0);
  const auto result = geometry::minimizeOverRegion(region, objective, box);
  const double f0 = objective.value(x0);
  return result.lowerBound >= f0 - tol * (1.0 + std::fabs(f0));
}

}  // namespace rdio
