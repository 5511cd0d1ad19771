#pragma once

// Shared helpers for the test suites: random model generators and small
// independent oracles (vertex enumeration, grid search). These stay
// independent of the solver internals they are used to verify.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "rdio/milp.hpp"
#include "rdio/util.hpp"

namespace rdio::testsupport {

/// Random bounded LP with a planted interior point, so feasibility is known.
/// When `forceInfeasible` is set, a contradictory row pair is appended.
inline milp::LpModel randomLp(Rng& rng, int nVars, int nRows, bool forceInfeasible = false) {
  milp::LpModel lp;
  lp.sense = rng.uniform() < 0.5 ? milp::ObjSense::Minimize : milp::ObjSense::Maximize;
  Vec interior(nVars);
  for (int j = 0; j < nVars; ++j) {
    const double lo = rng.uniform(-5.0, 0.0);
    const double hi = lo + rng.uniform(1.0, 8.0);
    lp.addVar(lo, hi, rng.uniform(-2.0, 2.0));
    interior[j] = rng.uniform(lo, hi);
  }
  for (int i = 0; i < nRows; ++i) {
    std::vector<std::pair<int, double>> coeffs;
    double act = 0.0;
    for (int j = 0; j < nVars; ++j) {
      if (rng.uniform() < 0.7) {
        const double c = rng.uniform(-2.0, 2.0);
        if (c != 0.0) {
          coeffs.push_back({j, c});
          act += c * interior[j];
        }
      }
    }
    if (coeffs.empty()) continue;
    const double slack = rng.uniform(0.1, 2.0);
    if (rng.uniform() < 0.5) {
      lp.addRow(std::move(coeffs), milp::RowSense::LessEqual, act + slack);
    } else {
      lp.addRow(std::move(coeffs), milp::RowSense::GreaterEqual, act - slack);
    }
  }
  if (forceInfeasible && nVars > 0) {
    lp.addRow({{0, 1.0}}, milp::RowSense::GreaterEqual, lp.upper[0] + 1.0);
  }
  return lp;
}

/// Random bounded MILP: a random LP plus binary variables wired into rows.
inline milp::LpModel randomMilp(Rng& rng, int nCont, int nBin, int nRows) {
  milp::LpModel lp = randomLp(rng, nCont, nRows);
  for (int t = 0; t < nBin; ++t) {
    const int j = lp.addVar(0.0, 1.0, rng.uniform(-3.0, 3.0), true);
    // couple the binary to a random row so it is not separable
    if (!lp.rows.empty()) {
      auto& row = lp.rows[static_cast<std::size_t>(rng.uniformInt(0, static_cast<int>(lp.rows.size()) - 1))];
      const double c = rng.uniform(-2.0, 2.0);
      row.coeffs.push_back({j, c});
      if (row.sense == milp::RowSense::LessEqual) {
        row.rhs += std::max(c, 0.0);  // keep the planted point feasible for some assignment
      } else {
        row.rhs += std::min(c, 0.0);
      }
    }
  }
  return lp;
}

/// Brute-force vertex enumeration oracle for small dense LPs (<= 3 vars).
/// Enumerates all n-subsets of tight constraints, solves the n x n system,
/// keeps feasible candidates, and returns the best objective.
inline std::optional<double> vertexEnumerationOptimum(const milp::LpModel& lp) {
  const int n = lp.numVars();
  if (n > 3) throw InputError("vertexEnumerationOptimum: oracle limited to 3 variables");

  struct Plane {
    Vec a;
    double b;
  };
  std::vector<Plane> planes;
  for (const auto& row : lp.rows) {
    Vec a(n, 0.0);
    for (const auto& [j, v] : row.coeffs) a[j] += v;
    planes.push_back({a, row.rhs});
  }
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(lp.lower[j])) {
      Vec a(n, 0.0);
      a[j] = 1.0;
      planes.push_back({a, lp.lower[j]});
    }
    if (std::isfinite(lp.upper[j])) {
      Vec a(n, 0.0);
      a[j] = 1.0;
      planes.push_back({a, lp.upper[j]});
    }
  }

  auto feasible = [&](const Vec& x) {
    for (int j = 0; j < n; ++j) {
      if (x[j] < lp.lower[j] - 1e-7 || x[j] > lp.upper[j] + 1e-7) return false;
    }
    for (const auto& row : lp.rows) {
      const double act = milp::rowActivity(row, x);
      if (row.sense == milp::RowSense::LessEqual && act > row.rhs + 1e-7) return false;
      if (row.sense == milp::RowSense::GreaterEqual && act < row.rhs - 1e-7) return false;
      if (row.sense == milp::RowSense::Equal && std::fabs(act - row.rhs) > 1e-7) return false;
    }
    return true;
  };

  auto objective = [&](const Vec& x) {
    double v = 0.0;
    for (int j = 0; j < n; ++j) v += lp.objective[j] * x[j];
    return v;
  };

  const bool maximize = lp.sense == milp::ObjSense::Maximize;
  std::optional<double> best;
  const int P = static_cast<int>(planes.size());
  std::vector<int> idx(n);

  auto trySystem = [&](const std::vector<int>& pick) {
    // solve the square system by Gaussian elimination
    std::vector<Vec> A(n, Vec(n + 1, 0.0));
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) A[r][c] = planes[pick[r]].a[c];
      A[r][n] = planes[pick[r]].b;
    }
    for (int c = 0; c < n; ++c) {
      int piv = -1;
      double mag = 1e-9;
      for (int r = c; r < n; ++r) {
        if (std::fabs(A[r][c]) > mag) { mag = std::fabs(A[r][c]); piv = r; }
      }
      if (piv < 0) return;
      std::swap(A[c], A[piv]);
      for (int r = 0; r < n; ++r) {
        if (r == c) continue;
        const double f = A[r][c] / A[c][c];
        for (int k = c; k <= n; ++k) A[r][k] -= f * A[c][k];
      }
    }
    Vec x(n);
    for (int r = 0; r < n; ++r) x[r] = A[r][n] / A[r][r];
    if (!feasible(x)) return;
    const double v = objective(x);
    if (!best || (maximize ? v > *best : v < *best)) best = v;
  };

  std::vector<int> pick(n);
  auto rec = [&](auto&& self, int start, int depth) -> void {
    if (depth == n) {
      trySystem(pick);
      return;
    }
    for (int p = start; p < P; ++p) {
      pick[depth] = p;
      self(self, p + 1, depth + 1);
    }
  };
  if (n > 0) rec(rec, 0, 0);
  return best;
}

}  // namespace rdio::testsupport
