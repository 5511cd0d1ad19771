#include "rdio/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rdio/milp.hpp"
#include "rdio/util.hpp"

namespace rdio::geometry {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFwGapTol = 1e-6;
constexpr int kFwIterCap = 10000;

double pointSetScale(const Point& x, const std::vector<Point>& points) {
  double m = linalg::normInf(x);
  for (const auto& p : points) m = std::max(m, linalg::normInf(p));
  return 1.0 + m;
}

}  // namespace

double hullResidual(const Point& x, const std::vector<Point>& points) {
  if (points.empty()) throw InputError("hullMembership: empty point set");
  const std::size_t m = x.size();
  for (const auto& p : points) {
    if (p.size() != m) throw InputError("hullMembership: dimension mismatch");
  }
  // min t  s.t.  -t <= sum_k w_k p^k_j - x_j <= t,  sum_k w_k = 1,  w >= 0
  milp::LpModel lp;
  const int n = static_cast<int>(points.size());
  for (int k = 0; k < n; ++k) lp.addVar(0.0, 1.0, 0.0);
  const int tVar = lp.addVar(0.0, kInf, 1.0);
  {
    std::vector<std::pair<int, double>> sum;
    for (int k = 0; k < n; ++k) sum.push_back({k, 1.0});
    lp.addRow(std::move(sum), milp::RowSense::Equal, 1.0);
  }
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<std::pair<int, double>> up, down;
    for (int k = 0; k < n; ++k) {
      const double v = points[static_cast<std::size_t>(k)][j];
      if (v != 0.0) {
        up.push_back({k, v});
        down.push_back({k, v});
      }
    }
    up.push_back({tVar, -1.0});
    down.push_back({tVar, 1.0});
    lp.addRow(std::move(up), milp::RowSense::LessEqual, x[j]);
    lp.addRow(std::move(down), milp::RowSense::GreaterEqual, x[j]);
  }
  const auto sol = milp::solveLp(lp);
  if (sol.status != milp::LpStatus::Optimal) {
    throw NumericalError("hullMembership: feasibility LP did not solve");
  }
  return sol.objective;
}

bool hullMembership(const Point& x, const std::vector<Point>& points, double tol) {
  return hullResidual(x, points) <= tol * pointSetScale(x, points);
}

namespace {

// Away-step Frank-Wolfe over the unit weight simplex for a convex quadratic.
// Linear convergence in practice thanks to the away direction; the duality
// gap certifies optimality.
PreferredSolution frankWolfeSimplex(const std::vector<Point>& points, const Objective& objective) {
  const std::size_t n = points.size();
  const std::size_t m = points.front().size();

  Vec w(n, 0.0);
  std::size_t bestStart = 0;
  double bestVal = objective.value(points[0]);
  for (std::size_t k = 1; k < n; ++k) {
    const double v = objective.value(points[k]);
    if (v < bestVal) { bestVal = v; bestStart = k; }
  }
  w[bestStart] = 1.0;
  Point x = points[bestStart];

  double gap = kInf;
  for (int iter = 0; iter < kFwIterCap; ++iter) {
    const Vec g = objective.gradient(x);
    // toward vertex: smallest gradient inner product
    std::size_t s = 0;
    double sVal = kInf;
    for (std::size_t k = 0; k < n; ++k) {
      const double v = linalg::dot(g, points[k]);
      if (v < sVal) { sVal = v; s = k; }
    }
    // away vertex: largest inner product within the support
    std::size_t a = 0;
    double aVal = -kInf;
    for (std::size_t k = 0; k < n; ++k) {
      if (w[k] <= 1e-14) continue;
      const double v = linalg::dot(g, points[k]);
      if (v > aVal) { aVal = v; a = k; }
    }
    const double gx = linalg::dot(g, x);
    gap = gx - sVal;
    if (gap <= kFwGapTol) break;

    const bool awayStep = (aVal - gx) > gap && w[a] < 1.0 - 1e-14;
    Vec d(m, 0.0);
    double gammaMax = 1.0;
    if (awayStep) {
      for (std::size_t j = 0; j < m; ++j) d[j] = x[j] - points[a][j];
      gammaMax = w[a] / (1.0 - w[a]);
    } else {
      for (std::size_t j = 0; j < m; ++j) d[j] = points[s][j] - x[j];
    }
    const double gd = linalg::dot(g, d);
    if (gd >= -1e-15) break;  // no descent left along either direction
    double curvature = 0.0;
    if (objective.kind == Objective::Kind::ConvexQuadratic && !objective.Q.empty()) {
      curvature = linalg::dot(d, linalg::matVec(objective.Q, d));
    }
    double gamma = gammaMax;
    if (curvature > 1e-300) gamma = std::min(gammaMax, -gd / (2.0 * curvature));
    if (gamma <= 0.0) break;

    if (awayStep) {
      const double factor = 1.0 + gamma;
      for (std::size_t k = 0; k < n; ++k) w[k] *= factor;
      w[a] -= gamma;
      if (w[a] < 1e-15) w[a] = 0.0;
    } else {
      for (std::size_t k = 0; k < n; ++k) w[k] *= 1.0 - gamma;
      w[s] += gamma;
    }
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += w[k] * points[k][j];
      x[j] = acc;
    }
  }
  if (gap > kFwGapTol) {
    std::ostringstream msg;
    msg << "preferredSolution: conditional gradient stopped with duality gap " << gap;
    throw NumericalError(msg.str());
  }
  return PreferredSolution{std::move(x), std::move(w)};
}

}  // namespace

PreferredSolution preferredSolution(const std::vector<Point>& accepted, const Objective& objective) {
  if (accepted.empty()) throw InputError("preferredSolution: no accepted points");
  objective.validate();
  if (objective.kind == Objective::Kind::Linear) {
    std::size_t best = 0;
    double bestVal = linalg::dot(objective.c, accepted[0]);
    for (std::size_t k = 1; k < accepted.size(); ++k) {
      const double v = linalg::dot(objective.c, accepted[k]);
      if (v < bestVal) { bestVal = v; best = k; }  // ties keep the lowest index
    }
    Vec w(accepted.size(), 0.0);
    w[best] = 1.0;
    return PreferredSolution{accepted[best], std::move(w)};
  }
  return frankWolfeSimplex(accepted, objective);
}

Halfspace tangentHalfspace(const Objective& objective, const Point& x0) {
  const Vec g = objective.gradient(x0);
  const double scale = 1.0 + linalg::normInf(objective.c) +
                       (objective.Q.empty() ? 0.0 : linalg::normInf(objective.Q.data));
  if (linalg::normInf(g) <= 1e-12 * scale) {
    throw NumericalError(
        "tangentHalfspace: gradient vanishes at x0 (unconstrained minimum, half-space undefined)");
  }
  return Halfspace{g, linalg::dot(g, x0)};
}

bool sublevelContains(const Objective& objective, const Point& x0, const Point& x) {
  const double f0 = objective.value(x0);
  return objective.value(x) >= f0 - 1e-12 * (1.0 + std::fabs(f0));
}

std::string WellPosednessReport::describe() const {
  std::ostringstream out;
  out << (overall ? "well-posed" : "NOT well-posed");
  for (std::size_t i = 0; i < acceptedFeasibleForKnown.size(); ++i) {
    if (!acceptedFeasibleForKnown[i]) out << "; accepted point " << i << " infeasible for known constraints";
  }
  for (std::size_t i = 0; i < rejectedInHull.size(); ++i) {
    if (rejectedInHull[i]) out << "; rejected point " << i << " lies in the accepted hull";
  }
  for (std::size_t i = 0; i < templateFeasible.size(); ++i) {
    if (!templateFeasible[i]) out << "; template " << i << " admits no feasible parameters";
  }
  return out.str();
}

WellPosednessReport checkWellPosed(const Dataset& dataset, const Region& known,
                                   const std::vector<NonlinearTemplate>& templates, double tol) {
  dataset.validate();
  if (dataset.acceptedCount() == 0) throw InputError("checkWellPosed: dataset has no accepted points");

  WellPosednessReport report;
  const auto accepted = dataset.acceptedPoints();
  const auto rejected = dataset.rejectedPoints();

  for (const auto& p : accepted) {
    report.acceptedFeasibleForKnown.push_back(regionContains(known, p, tol));
  }
  for (const auto& p : rejected) {
    report.rejectedInHull.push_back(hullMembership(p, accepted, tol));
  }
  for (const auto& tmpl : templates) {
    // max s  s.t.  sum_j q_j phi_j(x^k) >= s  for all accepted k,  q admissible
    milp::LpModel lp;
    lp.sense = milp::ObjSense::Maximize;
    for (int j = 0; j < tmpl.paramDim(); ++j) {
      lp.addVar(tmpl.effectiveLower(j), tmpl.effectiveUpper(j), 0.0);
    }
    const int sVar = lp.addVar(-kInf, 1.0, 1.0);
    for (const auto& p : accepted) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < tmpl.paramDim(); ++j) {
        const double phi = tmpl.basis[static_cast<std::size_t>(j)].eval(p);
        if (phi != 0.0) row.push_back({j, phi});
      }
      row.push_back({sVar, -1.0});
      lp.addRow(std::move(row), milp::RowSense::GreaterEqual, 0.0);
    }
    const auto sol = milp::solveLp(lp);
    report.templateFeasible.push_back(sol.status == milp::LpStatus::Optimal &&
                                      sol.objective >= -tol);
  }

  report.overall = true;
  for (bool ok : report.acceptedFeasibleForKnown) report.overall = report.overall && ok;
  for (bool inHull : report.rejectedInHull) report.overall = report.overall && !inHull;
  for (bool ok : report.templateFeasible) report.overall = report.overall && ok;
  return report;
}

namespace {

struct PolytopeLp {
  milp::LpModel lp;  // variables are the m coordinates
};

PolytopeLp linearPart(const Region& region, const std::vector<std::pair<double, double>>& box) {
  PolytopeLp poly;
  for (const auto& [lo, hi] : box) poly.lp.addVar(lo, hi, 0.0);
  auto addGe = [&poly](const Vec& a, double b) {
    std::vector<std::pair<int, double>> row;
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (a[j] != 0.0) row.push_back({static_cast<int>(j), a[j]});
    }
    poly.lp.addRow(std::move(row), milp::RowSense::GreaterEqual, b);
  };
  for (const auto& lc : region.knownLinear) addGe(lc.a, lc.b);
  for (const auto& lc : region.inferredLinear) addGe(lc.a, lc.b);
  if (region.tangent) addGe(region.tangent->normal, region.tangent->offset);
  return poly;
}

bool onBox(const Point& x, const std::vector<std::pair<double, double>>& box) {
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double span = box[j].second - box[j].first;
    const double edge = 1e-7 * (1.0 + std::fabs(span));
    if (x[j] <= box[j].first + edge || x[j] >= box[j].second - edge) return true;
  }
  return false;
}

// Minimize a convex quadratic over a polytope by away-step conditional
// gradient with an LP as the linear minimization oracle. Atoms are the LP
// vertices returned along the way.
MinimizeResult quadraticOverPolytope(milp::LpModel& lp, const Objective& objective,
                                     const std::vector<std::pair<double, double>>& box) {
  MinimizeResult out;
  const std::size_t m = box.size();
  // start from the vertex minimizing the linearization at the box center
  Point center(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) center[j] = 0.5 * (box[j].first + box[j].second);
  Vec g = objective.gradient(center);
  for (std::size_t j = 0; j < m; ++j) lp.objective[j] = g[j];
  auto first = milp::solveLp(lp);
  if (first.status == milp::LpStatus::Infeasible) {
    throw InputError("minimizeOverRegion: region is empty within the search box");
  }
  std::vector<Point> atoms{first.x};
  Vec weights{1.0};
  Point x = first.x;

  double gap = kInf;
  for (int iter = 0; iter < kFwIterCap; ++iter) {
    g = objective.gradient(x);
    for (std::size_t j = 0; j < m; ++j) lp.objective[j] = g[j];
    const auto lmo = milp::solveLp(lp);
    if (lmo.status != milp::LpStatus::Optimal) {
      throw NumericalError("minimizeOverRegion: LP oracle failed");
    }
    gap = linalg::dot(g, x) - lmo.objective;
    if (gap <= kFwGapTol) break;

    // away atom
    std::size_t a = 0;
    double aVal = -kInf;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      const double v = linalg::dot(g, atoms[k]);
      if (v > aVal) { aVal = v; a = k; }
    }
    const double gx = linalg::dot(g, x);
    const bool away = (aVal - gx) > (gx - lmo.objective) && weights[a] < 1.0 - 1e-14;

    Vec d(m, 0.0);
    double gammaMax = 1.0;
    if (away) {
      for (std::size_t j = 0; j < m; ++j) d[j] = x[j] - atoms[a][j];
      gammaMax = weights[a] / (1.0 - weights[a]);
    } else {
      for (std::size_t j = 0; j < m; ++j) d[j] = lmo.x[j] - x[j];
    }
    const double gd = linalg::dot(g, d);
    if (gd >= -1e-15) break;
    double curvature = 0.0;
    if (!objective.Q.empty()) curvature = linalg::dot(d, linalg::matVec(objective.Q, d));
    double gamma = gammaMax;
    if (curvature > 1e-300) gamma = std::min(gammaMax, -gd / (2.0 * curvature));
    if (gamma <= 0.0) break;

    if (away) {
      const double factor = 1.0 + gamma;
      for (auto& wk : weights) wk *= factor;
      weights[a] -= gamma;
    } else {
      for (auto& wk : weights) wk *= 1.0 - gamma;
      bool merged = false;
      for (std::size_t k = 0; k < atoms.size(); ++k) {
        if (linalg::normInf(linalg::sub(atoms[k], lmo.x)) < 1e-12) {
          weights[k] += gamma;
          merged = true;
          break;
        }
      }
      if (!merged) {
        atoms.push_back(lmo.x);
        weights.push_back(gamma);
      }
    }
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < atoms.size(); ++k) acc += weights[k] * atoms[k][j];
      x[j] = acc;
    }
  }
  out.x = x;
  out.value = objective.value(x);
  out.lowerBound = out.value - std::max(gap, 0.0);
  out.boundActive = onBox(x, box);
  return out;
}

}  // namespace

MinimizeResult minimizeOverRegion(const Region& region, const Objective& objective,
                                  const std::vector<std::pair<double, double>>& box) {
  objective.validate();
  PolytopeLp poly = linearPart(region, box);

  const bool hasNonlinear = !region.knownNonlinear.empty() || !region.inferredNonlinear.empty();
  auto nonlinearRows = [&region](const Point& x) {
    // (violation, gradient, value) of the most violated concave constraint
    double worst = 0.0;
    Vec grad;
    double value = 0.0;
    auto scan = [&](const NonlinearTemplate& tmpl, const Vec& q) {
      const double v = tmpl.eval(q, x);
      if (-v > worst) {
        worst = -v;
        grad = tmpl.gradientX(q, x);
        value = v;
      }
    };
    for (const auto& [tmpl, q] : region.knownNonlinear) scan(tmpl, q);
    for (const auto& [tmpl, q] : region.inferredNonlinear) scan(tmpl, q);
    return std::tuple<double, Vec, double>(worst, grad, value);
  };

  const std::size_t m = box.size();
  MinimizeResult result;
  // Outer linearization: cut the most violated concave constraint at the
  // current minimizer until the polytope relaxation is feasible for them.
  for (int round = 0; round < 200; ++round) {
    if (objective.kind == Objective::Kind::Linear) {
      for (std::size_t j = 0; j < m; ++j) poly.lp.objective[j] = objective.c[j];
      const auto sol = milp::solveLp(poly.lp);
      if (sol.status == milp::LpStatus::Infeasible) {
        throw InputError("minimizeOverRegion: region is empty within the search box");
      }
      if (sol.status == milp::LpStatus::Unbounded) {
        result.ray = sol.ray;
        result.boundActive = true;
        result.value = -kInf;
        result.lowerBound = -kInf;
        return result;
      }
      result.x = sol.x;
      result.value = sol.objective;
      result.lowerBound = sol.objective;
      result.boundActive = onBox(sol.x, box);
    } else {
      result = quadraticOverPolytope(poly.lp, objective, box);
    }
    if (!hasNonlinear) return result;
    auto [violation, grad, value] = nonlinearRows(result.x);
    if (violation <= 1e-8 * membershipScale(result.x)) return result;
    // supporting cut: g(x*) + grad'(x - x*) >= 0 contains {g >= 0} by concavity
    std::vector<std::pair<int, double>> row;
    for (std::size_t j = 0; j < m; ++j) {
      if (grad[j] != 0.0) row.push_back({static_cast<int>(j), grad[j]});
    }
    poly.lp.addRow(std::move(row), milp::RowSense::GreaterEqual,
                   linalg::dot(grad, result.x) - value);
  }
  throw NumericalError("minimizeOverRegion: outer linearization did not converge");
}

std::vector<std::pair<double, double>> defaultSearchBox(const Region& region, const Point& x0) {
  double mag = linalg::normInf(x0);
  for (const auto& lc : region.knownLinear) mag = std::max(mag, std::fabs(lc.b));
  for (const auto& lc : region.inferredLinear) mag = std::max(mag, std::fabs(lc.b));
  const double half = 10.0 * (1.0 + mag);
  std::vector<std::pair<double, double>> box(x0.size());
  for (std::size_t j = 0; j < x0.size(); ++j) box[j] = {x0[j] - half, x0[j] + half};
  return box;
}

}  // namespace rdio::geometry
