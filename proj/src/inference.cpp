#include "rdio/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "rdio/util.hpp"

namespace rdio::inference {

namespace {

constexpr double kTiny = 1e-9;

std::string pointLabel(int k) {
  std::ostringstream out;
  out << "rejected point #" << k;
  return out.str();
}

}  // namespace

ResolvedParams resolveParams(const Dataset& dataset, const RdioConfig& config) {
  dataset.validate();
  if (dataset.observations.empty()) throw InputError("resolveParams: empty dataset");
  const std::size_t m = dataset.dimension();

  ResolvedParams out;
  out.boxLo.assign(m, milp::kInfinity);
  out.boxHi.assign(m, -milp::kInfinity);
  for (const auto& obs : dataset.observations) {
    for (std::size_t j = 0; j < m; ++j) {
      out.boxLo[j] = std::min(out.boxLo[j], obs.point[j]);
      out.boxHi[j] = std::max(out.boxHi[j], obs.point[j]);
    }
  }
  double maxRange = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double range = out.boxHi[j] - out.boxLo[j];
    maxRange = std::max(maxRange, range);
    const double pad = range > 0.0 ? 0.1 * range : 0.1 * std::max(1.0, std::fabs(out.boxLo[j]));
    out.boxLo[j] -= pad;
    out.boxHi[j] += pad;
  }

  out.epsilon = config.epsilon > 0.0 ? config.epsilon : 1e-3 * std::max(maxRange, 1e-3);
  out.capA = 1.0;
  double absSum = 0.0, rangeSum = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    absSum += std::max(std::fabs(out.boxLo[j]), std::fabs(out.boxHi[j]));
    rangeSum += out.boxHi[j] - out.boxLo[j];
  }
  out.capB = out.capA * absSum + 1.0;
  out.bigM = config.bigM > 0.0 ? config.bigM : rangeSum * out.capA + out.capB + out.epsilon;
  if (out.bigM <= out.epsilon) throw InputError("resolveParams: big-M must exceed epsilon");
  return out;
}

Region appendTangentHalfspace(const Region& region, const Objective& objective, const Point& x0) {
  Region out = region;
  out.tangent = geometry::tangentHalfspace(objective, x0);
  return out;
}

RdioProblem buildRdio(const Dataset& dataset, const Region& known, const Point& x0,
                      const Objective& objective, const RdioConfig& config) {
  dataset.validate();
  if (config.numLinear < 0) throw InputError("buildRdio: negative constraint count");
  if (config.numLinear + config.numTemplates() < 1) {
    throw InputError("buildRdio: at least one inferred constraint is required");
  }
  if (!known.tangent) {
    throw InputError("buildRdio: tangent half-space must be appended to the known region first");
  }
  for (const auto& tmpl : config.templates) {
    for (const auto& bf : tmpl.basis) {
      if (bf.index < 0 || bf.index >= static_cast<int>(dataset.dimension())) {
        throw InputError("buildRdio: template basis index out of range");
      }
    }
  }
  (void)objective;  // the objective enters through the tangent row of `known`

  RdioProblem problem;
  RdioLayout& L = problem.layout;
  milp::LpModel& M = problem.model;
  M.sense = milp::ObjSense::Maximize;

  L.m = static_cast<int>(dataset.dimension());
  L.numLinear = config.numLinear;
  for (const auto& tmpl : config.templates) L.paramDims.push_back(tmpl.paramDim());
  L.accepted = dataset.acceptedPoints();
  L.rejected = dataset.rejectedPoints();
  L.kPlus = static_cast<int>(L.accepted.size());
  L.kMinus = static_cast<int>(L.rejected.size());
  L.params = resolveParams(dataset, config);
  L.normalization = config.normalization;
  L.x0 = x0;
  L.known = known;
  L.templates = config.templates;

  const double eps = L.params.epsilon;
  const double bigM = L.params.bigM;

  // the ordered constraint index set I
  for (int r = 0; r < static_cast<int>(known.knownLinear.size()); ++r) {
    L.constraints.push_back({ConsKind::KnownLinear, r});
  }
  L.constraints.push_back({ConsKind::Tangent, 0});
  for (int n = 0; n < static_cast<int>(known.knownNonlinear.size()); ++n) {
    L.constraints.push_back({ConsKind::KnownTemplate, n});
  }
  for (int n = 0; n < config.numTemplates(); ++n) {
    L.constraints.push_back({ConsKind::InferredTemplate, n});
  }
  for (int ell = 0; ell < config.numLinear; ++ell) {
    L.constraints.push_back({ConsKind::InferredLinear, ell});
  }
  const int nCons = static_cast<int>(L.constraints.size());

  auto name = [](const char* stem, int i, int j = -1) {
    std::ostringstream out;
    out << stem << "_" << i;
    if (j >= 0) out << "_" << j;
    return out.str();
  };

  // inferred-row coefficients and offsets
  L.aIdx.assign(static_cast<std::size_t>(config.numLinear) * L.m, -1);
  L.bIdx.assign(config.numLinear, -1);
  for (int ell = 0; ell < config.numLinear; ++ell) {
    for (int j = 0; j < L.m; ++j) {
      L.aIdx[static_cast<std::size_t>(ell) * L.m + j] =
          M.addVar(-L.params.capA, L.params.capA, 0.0, false, name("a", ell, j));
    }
    L.bIdx[ell] = M.addVar(-L.params.capB, L.params.capB, 0.0, false, name("b", ell));
  }
  for (int n = 0; n < config.numTemplates(); ++n) {
    const auto& tmpl = config.templates[n];
    std::vector<int> idx;
    for (int t = 0; t < tmpl.paramDim(); ++t) {
      idx.push_back(M.addVar(tmpl.effectiveLower(t), tmpl.effectiveUpper(t), 0.0, false, name("q", n, t)));
    }
    L.qIdx.push_back(std::move(idx));
  }

  // fixed values of known rows against each rejected point
  auto knownRowSlack = [&](const ConsRef& ref, const Point& x) {
    switch (ref.kind) {
      case ConsKind::KnownLinear: return known.knownLinear[ref.index].slack(x);
      case ConsKind::Tangent: return linalg::dot(known.tangent->normal, x) - known.tangent->offset;
      case ConsKind::KnownTemplate: {
        const auto& [tmpl, qFixed] = known.knownNonlinear[ref.index];
        return tmpl.eval(qFixed, x);
      }
      default: throw InputError("knownRowSlack: not a known row");
    }
  };
  auto isKnownKind = [](ConsKind kind) {
    return kind == ConsKind::KnownLinear || kind == ConsKind::Tangent ||
           kind == ConsKind::KnownTemplate;
  };

  L.yIdx.assign(nCons, std::vector<int>(L.kMinus, -1));
  L.dIdx.assign(nCons, std::vector<int>(L.kMinus, -1));
  L.pIdx.assign(nCons, std::vector<int>(L.kMinus, -1));
  L.zIdx.assign(L.kMinus, -1);
  for (int k = 0; k < L.kMinus; ++k) {
    for (int i = 0; i < nCons; ++i) {
      const ConsRef ref = L.constraints[i];
      bool fixed = false;
      double fixedVal = 0.0;
      if (isKnownKind(ref.kind)) {
        // rejected points already cut by a known row take y = 0 up front;
        // rows that do not epsilon-cut the point are forced to y = 1
        const double slackVal = knownRowSlack(ref, L.rejected[k]);
        fixed = true;
        fixedVal = slackVal <= -eps + kTiny * (1.0 + std::fabs(slackVal)) ? 0.0 : 1.0;
      }
      L.yIdx[i][k] = fixed ? M.addVar(fixedVal, fixedVal, 0.0, true, name("y", i, k))
                           : M.addVar(0.0, 1.0, 0.0, true, name("y", i, k));
      if (!isKnownKind(ref.kind)) {
        L.dIdx[i][k] = M.addVar(0.0, bigM, 0.0, false, name("d", i, k));
      }
      const bool pFixedOne = fixed && fixedVal == 1.0;
      L.pIdx[i][k] = pFixedOne ? M.addVar(1.0, 1.0, 0.0, true, name("p", i, k))
                               : M.addVar(0.0, 1.0, 0.0, true, name("p", i, k));
    }
    L.zIdx[k] = M.addVar(0.0, bigM, 1.0, false, name("z", k));
  }
  L.deltaPlus.assign(config.numLinear, -1);
  L.deltaMinus.assign(config.numLinear, -1);
  for (int ell = 0; ell < config.numLinear; ++ell) {
    L.deltaPlus[ell] = M.addVar(0.0, 1.0, 0.0, true, name("dp", ell));
    L.deltaMinus[ell] = M.addVar(0.0, 1.0, 0.0, true, name("dm", ell));
  }

  // primal feasibility of accepted points for inferred rows
  for (int ell = 0; ell < config.numLinear; ++ell) {
    for (int k = 0; k < L.kPlus; ++k) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < L.m; ++j) {
        const double xj = L.accepted[k][j];
        if (xj != 0.0) row.push_back({L.a(ell, j), xj});
      }
      row.push_back({L.bIdx[ell], -1.0});
      M.addRow(std::move(row), milp::RowSense::GreaterEqual, 0.0, TagPrimalFeasLinear);
    }
  }
  for (int n = 0; n < config.numTemplates(); ++n) {
    const auto& tmpl = config.templates[n];
    for (int k = 0; k < L.kPlus; ++k) {
      std::vector<std::pair<int, double>> row;
      for (int t = 0; t < tmpl.paramDim(); ++t) {
        const double phi = tmpl.basis[t].eval(L.accepted[k]);
        if (phi != 0.0) row.push_back({L.qIdx[n][t], phi});
      }
      M.addRow(std::move(row), milp::RowSense::GreaterEqual, 0.0, TagPrimalFeasTemplate);
    }
  }

  // big-M infeasibility rows over every constraint in I
  for (int i = 0; i < nCons; ++i) {
    const ConsRef ref = L.constraints[i];
    for (int k = 0; k < L.kMinus; ++k) {
      const Point& xk = L.rejected[k];
      switch (ref.kind) {
        case ConsKind::KnownLinear:
        case ConsKind::Tangent:
        case ConsKind::KnownTemplate: {
          const int tag = ref.kind == ConsKind::KnownLinear ? TagBigMKnownLinear
                          : ref.kind == ConsKind::Tangent   ? TagBigMTangent
                                                            : TagBigMKnownTemplate;
          // constants: M y >= slack + eps
          M.addRow({{L.yIdx[i][k], bigM}}, milp::RowSense::GreaterEqual,
                   knownRowSlack(ref, xk) + eps, tag);
          break;
        }
        case ConsKind::InferredTemplate: {
          const auto& tmpl = config.templates[ref.index];
          std::vector<std::pair<int, double>> row;
          for (int t = 0; t < tmpl.paramDim(); ++t) {
            const double phi = tmpl.basis[t].eval(xk);
            if (phi != 0.0) row.push_back({L.qIdx[ref.index][t], phi});
          }
          row.push_back({L.yIdx[i][k], -bigM});
          M.addRow(std::move(row), milp::RowSense::LessEqual, -eps, TagBigMInferredTemplate);
          break;
        }
        case ConsKind::InferredLinear: {
          std::vector<std::pair<int, double>> row;
          for (int j = 0; j < L.m; ++j) {
            if (xk[j] != 0.0) row.push_back({L.a(ref.index, j), xk[j]});
          }
          row.push_back({L.bIdx[ref.index], -1.0});
          row.push_back({L.yIdx[i][k], -bigM});
          M.addRow(std::move(row), milp::RowSense::LessEqual, -eps, TagBigMInferredLinear);
          break;
        }
      }
    }
  }

  // cover: at least one constraint cuts each rejected point
  for (int k = 0; k < L.kMinus; ++k) {
    std::vector<std::pair<int, double>> row;
    for (int i = 0; i < nCons; ++i) row.push_back({L.yIdx[i][k], 1.0});
    M.addRow(std::move(row), milp::RowSense::LessEqual, static_cast<double>(nCons - 1), TagCover);
  }

  // normalization of inferred rows
  for (int ell = 0; ell < config.numLinear; ++ell) {
    if (config.normalization == Normalization::L1Proxy) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < L.m; ++j) row.push_back({L.a(ell, j), 1.0});
      row.push_back({L.deltaPlus[ell], -1.0});
      row.push_back({L.deltaMinus[ell], 1.0});
      M.addRow(std::move(row), milp::RowSense::Equal, 0.0, TagNormMembership);
    } else {
      // anchored coordinate pinned to +/-1 within the coefficient box
      M.addRow({{L.a(ell, 0), 1.0}, {L.deltaPlus[ell], -1.0}, {L.deltaMinus[ell], 1.0}},
               milp::RowSense::Equal, 0.0, TagNormMembership);
    }
    M.addRow({{L.deltaPlus[ell], 1.0}, {L.deltaMinus[ell], 1.0}}, milp::RowSense::Equal, 1.0,
             TagNormExtra);
  }

  // separation-distance linearization
  for (int k = 0; k < L.kMinus; ++k) {
    const Point& xk = L.rejected[k];
    for (int i = 0; i < nCons; ++i) {
      const ConsRef ref = L.constraints[i];
      if (ref.kind == ConsKind::InferredTemplate) {
        const auto& tmpl = config.templates[ref.index];
        std::vector<std::pair<int, double>> low, high;
        for (int t = 0; t < tmpl.paramDim(); ++t) {
          const double phi = tmpl.basis[t].eval(xk);
          if (phi != 0.0) {
            low.push_back({L.qIdx[ref.index][t], phi});
            high.push_back({L.qIdx[ref.index][t], phi});
          }
        }
        low.push_back({L.dIdx[i][k], 1.0});
        M.addRow(std::move(low), milp::RowSense::GreaterEqual, 0.0, TagSeparation);
        high.push_back({L.dIdx[i][k], 1.0});
        high.push_back({L.yIdx[i][k], -bigM});
        M.addRow(std::move(high), milp::RowSense::LessEqual, 0.0, TagSeparation);
      } else if (ref.kind == ConsKind::InferredLinear) {
        std::vector<std::pair<int, double>> low, high;
        for (int j = 0; j < L.m; ++j) {
          if (xk[j] != 0.0) {
            low.push_back({L.a(ref.index, j), xk[j]});
            high.push_back({L.a(ref.index, j), xk[j]});
          }
        }
        low.push_back({L.bIdx[ref.index], -1.0});
        low.push_back({L.dIdx[i][k], 1.0});
        M.addRow(std::move(low), milp::RowSense::GreaterEqual, 0.0, TagSeparation);
        high.push_back({L.bIdx[ref.index], -1.0});
        high.push_back({L.dIdx[i][k], 1.0});
        high.push_back({L.yIdx[i][k], -bigM});
        M.addRow(std::move(high), milp::RowSense::LessEqual, 0.0, TagSeparation);
      }
      if (L.dIdx[i][k] >= 0) {
        M.addRow({{L.dIdx[i][k], 1.0}, {L.yIdx[i][k], bigM}}, milp::RowSense::LessEqual, bigM,
                 TagSeparation);
        M.addRow({{L.dIdx[i][k], 1.0}, {L.yIdx[i][k], eps}}, milp::RowSense::GreaterEqual, eps,
                 TagSeparation);
        M.addRow({{L.zIdx[k], 1.0}, {L.dIdx[i][k], -1.0}, {L.pIdx[i][k], -bigM}},
                 milp::RowSense::LessEqual, 0.0, TagSeparation);
        M.addRow({{L.pIdx[i][k], 1.0}, {L.yIdx[i][k], -1.0}}, milp::RowSense::GreaterEqual, 0.0,
                 TagSeparation);
      } else {
        // known row: its distance to the point is a constant
        M.addRow({{L.zIdx[k], 1.0}, {L.pIdx[i][k], -bigM}}, milp::RowSense::LessEqual,
                 -knownRowSlack(L.constraints[i], xk), TagSeparation);
      }
    }
    std::vector<std::pair<int, double>> pcover;
    for (int i = 0; i < nCons; ++i) pcover.push_back({L.pIdx[i][k], 1.0});
    M.addRow(std::move(pcover), milp::RowSense::LessEqual, static_cast<double>(nCons - 1),
             TagSeparation);
  }

  // interchangeable inferred rows: order offsets to break symmetry
  for (int ell = 0; ell + 1 < config.numLinear; ++ell) {
    M.addRow({{L.bIdx[ell + 1], 1.0}, {L.bIdx[ell], -1.0}}, milp::RowSense::GreaterEqual, 0.0,
             TagSymmetryBreak);
  }

  return problem;
}

Region InferenceResult::assembled(bool includeTangent) const {
  Region region = known;
  if (!includeTangent) region.tangent.reset();
  for (std::size_t ell = 0; ell < b.size(); ++ell) {
    Vec row(A.cols);
    for (std::size_t j = 0; j < A.cols; ++j) row[j] = A(ell, j);
    region.inferredLinear.push_back({std::move(row), b[ell]});
  }
  for (std::size_t n = 0; n < q.size(); ++n) {
    region.inferredNonlinear.push_back({templates[n], q[n]});
  }
  return region;
}

namespace {

struct SeparatorRow {
  Vec a;
  double b = 0.0;
  double margin = 0.0;  // achieved cut margin on its own point
};

// Max-margin separating hyperplane for one rejected point against all
// accepted points, under the active normalization. `forceContain` points are
// pinned to the feasible side.
SeparatorRow maxMarginSeparator(const std::vector<Point>& accepted, const Point& target,
                                const std::vector<Point>& forceContain,
                                const ResolvedParams& params, Normalization norm) {
  const int m = static_cast<int>(target.size());
  SeparatorRow best;
  best.margin = -milp::kInfinity;
  for (const double sigma : {1.0, -1.0}) {
    milp::LpModel lp;
    lp.sense = milp::ObjSense::Maximize;
    for (int j = 0; j < m; ++j) lp.addVar(-params.capA, params.capA, 0.0);
    const int bVar = lp.addVar(-params.capB, params.capB, 0.0);
    const int tVar = lp.addVar(0.0, params.bigM, 1.0);
    if (norm == Normalization::L1Proxy) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < m; ++j) row.push_back({j, 1.0});
      lp.addRow(std::move(row), milp::RowSense::Equal, sigma);
    } else {
      lp.addRow({{0, 1.0}}, milp::RowSense::Equal, sigma);
    }
    auto sideRow = [&lp, m](const Point& p, int bv) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < m; ++j) {
        if (p[j] != 0.0) row.push_back({j, p[j]});
      }
      row.push_back({bv, -1.0});
      return row;
    };
    for (const auto& p : accepted) {
      lp.addRow(sideRow(p, bVar), milp::RowSense::GreaterEqual, 0.0);
    }
    for (const auto& p : forceContain) {
      lp.addRow(sideRow(p, bVar), milp::RowSense::GreaterEqual, 0.0);
    }
    {
      auto row = sideRow(target, bVar);
      row.push_back({tVar, 1.0});
      lp.addRow(std::move(row), milp::RowSense::LessEqual, 0.0);  // a'x - b + t <= 0
    }
    const auto sol = milp::solveLp(lp);
    if (sol.status != milp::LpStatus::Optimal) continue;
    if (sol.objective > best.margin) {
      best.margin = sol.objective;
      best.a.assign(sol.x.begin(), sol.x.begin() + m);
      best.b = sol.x[bVar];
    }
  }
  return best;
}

// Push the offset down until no rejected point sits in the forbidden band
// (0, eps) of the row; containment is always reachable by lowering b.
void repairBandByLowering(SeparatorRow& row, const std::vector<Point>& rejected, double eps) {
  for (std::size_t pass = 0; pass <= rejected.size(); ++pass) {
    double newB = row.b;
    bool banded = false;
    for (const auto& p : rejected) {
      const double margin = row.b - linalg::dot(row.a, p);
      if (margin > kTiny && margin < eps * (1.0 - 1e-9)) {
        banded = true;
        newB = std::min(newB, linalg::dot(row.a, p));
      }
    }
    if (!banded) return;
    row.b = newB;
  }
}

// The objective-gradient row (the tangent row re-expressed as an inferred
// row), normalized; empty optional when the normalization cannot express it.
std::optional<SeparatorRow> gradientFillerRow(const Halfspace& tangent,
                                              const std::vector<Point>& accepted,
                                              const std::vector<Point>& rejected,
                                              const ResolvedParams& params, Normalization norm,
                                              double eps) {
  const Vec& g = tangent.normal;
  double scale = 0.0;
  if (norm == Normalization::L1Proxy) {
    const double s = std::accumulate(g.begin(), g.end(), 0.0);
    if (std::fabs(s) < 1e-9 * (1.0 + linalg::normInf(g))) return std::nullopt;
    scale = 1.0 / std::fabs(s);
  } else {
    if (std::fabs(g[0]) < 1e-9 * (1.0 + linalg::normInf(g))) return std::nullopt;
    scale = 1.0 / std::fabs(g[0]);
  }
  SeparatorRow row;
  row.a = linalg::scaled(g, scale);
  if (linalg::normInf(row.a) > params.capA + kTiny) return std::nullopt;
  row.b = tangent.offset * scale;
  (void)accepted;  // every accepted point satisfies the tangent row already
  repairBandByLowering(row, rejected, eps);
  return row;
}

// Fallback filler when the gradient row is not representable: a coordinate
// floor of the accepted points (contains them all, cuts nobody after repair).
SeparatorRow coordinateFillerRow(const std::vector<Point>& accepted,
                                 const std::vector<Point>& rejected, Normalization norm,
                                 double eps) {
  SeparatorRow row;
  const std::size_t m = accepted.front().size();
  row.a.assign(m, 0.0);
  row.a[0] = 1.0;
  (void)norm;  // a = e_1 satisfies both normalizations
  row.b = milp::kInfinity;
  for (const auto& p : accepted) row.b = std::min(row.b, p[0]);
  repairBandByLowering(row, rejected, eps);
  return row;
}

struct WarmStartCore {
  std::vector<SeparatorRow> separators;  // one per rejected point, band-repaired
};

WarmStartCore buildSeparators(const std::vector<Point>& accepted,
                              const std::vector<Point>& rejected, const ResolvedParams& params,
                              Normalization norm) {
  WarmStartCore core;
  const double eps = params.epsilon;
  for (std::size_t k = 0; k < rejected.size(); ++k) {
    std::vector<Point> forced;
    SeparatorRow row;
    bool done = false;
    for (std::size_t attempt = 0; attempt <= rejected.size(); ++attempt) {
      row = maxMarginSeparator(accepted, rejected[k], forced, params, norm);
      if (row.margin < eps * (1.0 - 1e-9)) {
        if (row.margin <= kTiny) {
          throw InputError("warm start: " + pointLabel(static_cast<int>(k)) +
                           " cannot be separated from the accepted hull "
                           "(well-posedness condition (c) violated)");
        }
        throw NumericalError("warm start: separation margin for " +
                             pointLabel(static_cast<int>(k)) +
                             " fell below epsilon; lower epsilon or re-sample");
      }
      // collect points caught in the forbidden (0, eps) band
      std::vector<Point> band;
      for (std::size_t kk = 0; kk < rejected.size(); ++kk) {
        if (kk == k) continue;
        const double margin = row.b - linalg::dot(row.a, rejected[kk]);
        if (margin > kTiny && margin < eps * (1.0 - 1e-9)) band.push_back(rejected[kk]);
      }
      if (band.empty()) {
        done = true;
        break;
      }
      forced.insert(forced.end(), band.begin(), band.end());
    }
    if (!done) throw NumericalError("warm start: band repair did not settle");
    core.separators.push_back(std::move(row));
  }
  return core;
}

WarmStart assembleWarmStart(std::vector<SeparatorRow> rows, const std::vector<NonlinearTemplate>& templates,
                            const std::vector<Point>& accepted, int m) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SeparatorRow& x, const SeparatorRow& y) { return x.b < y.b; });
  WarmStart ws;
  ws.A = Mat(rows.size(), m);
  ws.b.resize(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int j = 0; j < m; ++j) ws.A(r, j) = rows[r].a[j];
    ws.b[r] = rows[r].b;
  }
  // per-template admissible parameters maximizing the worst accepted margin
  for (const auto& tmpl : templates) {
    milp::LpModel lp;
    lp.sense = milp::ObjSense::Maximize;
    for (int t = 0; t < tmpl.paramDim(); ++t) {
      lp.addVar(tmpl.effectiveLower(t), tmpl.effectiveUpper(t), 0.0);
    }
    const int sVar = lp.addVar(-milp::kInfinity, 1.0, 1.0);
    for (const auto& p : accepted) {
      std::vector<std::pair<int, double>> row;
      for (int t = 0; t < tmpl.paramDim(); ++t) {
        const double phi = tmpl.basis[t].eval(p);
        if (phi != 0.0) row.push_back({t, phi});
      }
      row.push_back({sVar, -1.0});
      lp.addRow(std::move(row), milp::RowSense::GreaterEqual, 0.0);
    }
    const auto sol = milp::solveLp(lp);
    if (sol.status != milp::LpStatus::Optimal || sol.objective < 0.0) {
      throw NumericalError("warm start: template admits no feasible parameters");
    }
    ws.q.push_back(Vec(sol.x.begin(), sol.x.begin() + tmpl.paramDim()));
  }
  return ws;
}

}  // namespace

WarmStart warmStartSeparation(const Dataset& dataset, const Point& x0, const Objective& objective,
                              const RdioConfig& config) {
  const auto accepted = dataset.acceptedPoints();
  const auto rejected = dataset.rejectedPoints();
  if (accepted.empty()) throw InputError("warmStartSeparation: no accepted points");
  if (config.numLinear < static_cast<int>(rejected.size()) + 1) {
    throw InputError("warmStartSeparation: needs numLinear >= |K-| + 1");
  }
  const ResolvedParams params = resolveParams(dataset, config);
  const Halfspace tangent = geometry::tangentHalfspace(objective, x0);

  WarmStartCore core = buildSeparators(accepted, rejected, params, config.normalization);
  auto filler = gradientFillerRow(tangent, accepted, rejected, params, config.normalization,
                                  params.epsilon);
  SeparatorRow fill =
      filler ? *filler
             : (core.separators.empty()
                    ? coordinateFillerRow(accepted, rejected, config.normalization, params.epsilon)
                    : core.separators.front());
  std::vector<SeparatorRow> rows = core.separators;
  while (static_cast<int>(rows.size()) < config.numLinear) rows.push_back(fill);
  return assembleWarmStart(std::move(rows), config.templates, accepted,
                           static_cast<int>(dataset.dimension()));
}

Vec completeAssignment(const RdioProblem& problem, const WarmStart& ws) {
  const RdioLayout& L = problem.layout;
  const milp::LpModel& M = problem.model;
  if (static_cast<int>(ws.b.size()) != L.numLinear ||
      static_cast<int>(ws.q.size()) != static_cast<int>(L.templates.size())) {
    throw InputError("completeAssignment: warm start shape mismatch");
  }
  const double eps = L.params.epsilon;
  Vec x(M.numVars(), 0.0);
  // fixed variables take their pinned values
  for (int j = 0; j < M.numVars(); ++j) {
    if (M.lower[j] == M.upper[j]) x[j] = M.lower[j];
  }
  for (int ell = 0; ell < L.numLinear; ++ell) {
    for (int j = 0; j < L.m; ++j) x[L.a(ell, j)] = ws.A(ell, j);
    x[L.bIdx[ell]] = ws.b[ell];
    double s = 0.0;
    if (L.normalization == Normalization::L1Proxy) {
      for (int j = 0; j < L.m; ++j) s += ws.A(ell, j);
    } else {
      s = ws.A(ell, 0);
    }
    x[L.deltaPlus[ell]] = s > 0.0 ? 1.0 : 0.0;
    x[L.deltaMinus[ell]] = s > 0.0 ? 0.0 : 1.0;
  }
  for (std::size_t n = 0; n < ws.q.size(); ++n) {
    for (int t = 0; t < static_cast<int>(ws.q[n].size()); ++t) x[L.qIdx[n][t]] = ws.q[n][t];
  }

  const int nCons = static_cast<int>(L.constraints.size());
  for (int k = 0; k < L.kMinus; ++k) {
    double zBest = -milp::kInfinity;
    int zRow = -1;
    for (int i = 0; i < nCons; ++i) {
      const ConsRef ref = L.constraints[i];
      double margin = 0.0;  // violation of constraint i at rejected point k
      bool inferred = false;
      switch (ref.kind) {
        case ConsKind::KnownLinear:
          margin = -L.known.knownLinear[ref.index].slack(L.rejected[k]);
          break;
        case ConsKind::Tangent:
          margin = L.known.tangent->offset - linalg::dot(L.known.tangent->normal, L.rejected[k]);
          break;
        case ConsKind::KnownTemplate: {
          const auto& [tmpl, qF] = L.known.knownNonlinear[ref.index];
          margin = -tmpl.eval(qF, L.rejected[k]);
          break;
        }
        case ConsKind::InferredTemplate:
          margin = -L.templates[ref.index].eval(ws.q[ref.index], L.rejected[k]);
          inferred = true;
          break;
        case ConsKind::InferredLinear: {
          double act = 0.0;
          for (int j = 0; j < L.m; ++j) act += ws.A(ref.index, j) * L.rejected[k][j];
          margin = ws.b[ref.index] - act;
          inferred = true;
          break;
        }
      }
      double y;
      if (inferred) {
        if (margin >= eps * (1.0 - 1e-9)) y = 0.0;
        else if (margin <= kTiny * (1.0 + std::fabs(margin))) y = 1.0;
        else throw NumericalError("completeAssignment: a rejected point sits in the (0,eps) band");
        x[L.yIdx[i][k]] = y;
        x[L.dIdx[i][k]] = y == 0.0 ? margin : 0.0;
      } else {
        y = x[L.yIdx[i][k]];  // fixed by the model bounds
      }
      x[L.pIdx[i][k]] = 1.0;
      if (y == 0.0 && margin > zBest) {
        zBest = margin;
        zRow = i;
      }
    }
    if (zRow < 0) {
      throw NumericalError("completeAssignment: no constraint cuts " + pointLabel(k));
    }
    x[L.pIdx[zRow][k]] = 0.0;
    x[L.zIdx[k]] = std::min(zBest, L.params.bigM);
  }
  return x;
}

namespace {

// Cover heuristic for numLinear <= |K-|: greedily pick separator rows that
// epsilon-cut the most uncovered rejected points.
std::optional<WarmStart> greedyCoverWarmStart(const RdioLayout& L) {
  if (L.kMinus == 0 || L.numLinear == 0) return std::nullopt;
  WarmStartCore core;
  try {
    core = buildSeparators(L.accepted, L.rejected, L.params, L.normalization);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  const double eps = L.params.epsilon;
  std::vector<std::vector<int>> covers(core.separators.size());
  for (std::size_t r = 0; r < core.separators.size(); ++r) {
    for (int k = 0; k < L.kMinus; ++k) {
      const double margin =
          core.separators[r].b - linalg::dot(core.separators[r].a, L.rejected[k]);
      if (margin >= eps * (1.0 - 1e-9)) covers[r].push_back(k);
    }
  }
  std::vector<bool> covered(L.kMinus, false);
  std::vector<SeparatorRow> picked;
  while (static_cast<int>(picked.size()) < L.numLinear) {
    int bestRow = -1, bestGain = 0;
    for (std::size_t r = 0; r < covers.size(); ++r) {
      int gain = 0;
      for (int k : covers[r]) gain += !covered[k];
      if (gain > bestGain) {
        bestGain = gain;
        bestRow = static_cast<int>(r);
      }
    }
    if (bestRow < 0) break;
    picked.push_back(core.separators[static_cast<std::size_t>(bestRow)]);
    for (int k : covers[static_cast<std::size_t>(bestRow)]) covered[k] = true;
  }
  if (std::find(covered.begin(), covered.end(), false) != covered.end()) return std::nullopt;
  if (picked.empty()) return std::nullopt;
  auto filler = gradientFillerRow(*L.known.tangent, L.accepted, L.rejected, L.params,
                                  L.normalization, eps);
  const SeparatorRow fill = filler ? *filler : picked.front();
  while (static_cast<int>(picked.size()) < L.numLinear) picked.push_back(fill);
  try {
    return assembleWarmStart(std::move(picked), L.templates, L.accepted, L.m);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

Dataset layoutDataset(const RdioLayout& L) {
  Dataset ds;
  for (const auto& p : L.accepted) ds.observations.push_back({p, Label::Accepted});
  for (const auto& p : L.rejected) ds.observations.push_back({p, Label::Rejected});
  return ds;
}

}  // namespace

InferenceResult solveRdio(const RdioProblem& problem, const RdioSolveOptions& options) {
  const RdioLayout& L = problem.layout;
  milp::SolverOptions milpOpts = options.milp;
  bool warmStarted = false;

  if (options.useWarmStart && !milpOpts.warmStart) {
    std::optional<WarmStart> ws;
    if (L.numLinear >= L.kMinus + 1) {
      try {
        WarmStartCore core = buildSeparators(L.accepted, L.rejected, L.params, L.normalization);
        auto filler = gradientFillerRow(*L.known.tangent, L.accepted, L.rejected, L.params,
                                        L.normalization, L.params.epsilon);
        SeparatorRow fill = filler ? *filler
                            : core.separators.empty()
                                ? coordinateFillerRow(L.accepted, L.rejected, L.normalization,
                                                      L.params.epsilon)
                                : core.separators.front();
        std::vector<SeparatorRow> rows = core.separators;
        while (static_cast<int>(rows.size()) < L.numLinear) rows.push_back(fill);
        ws = assembleWarmStart(std::move(rows), L.templates, L.accepted, L.m);
      } catch (const std::exception&) {
        ws.reset();
      }
    } else {
      ws = greedyCoverWarmStart(L);
    }
    if (ws) {
      try {
        Vec assignment = completeAssignment(problem, *ws);
        if (milp::maxViolation(problem.model, assignment) <= 1e-7) {
          milpOpts.warmStart = std::move(assignment);
          warmStarted = true;
        }
      } catch (const std::exception&) {
        // cold solve
      }
    }
  }

  const milp::MilpSolution sol = milp::solveMilp(problem.model, milpOpts);

  InferenceResult result;
  result.stats.nodes = sol.nodes;
  result.stats.lpSolves = sol.lpSolves;
  result.stats.wallSec = sol.wallSec;
  result.stats.warmStarted = warmStarted;
  result.templates = L.templates;
  result.known = L.known;
  result.x0 = L.x0;
  result.epsilon = L.params.epsilon;
  result.bigM = L.params.bigM;
  result.normalization = L.normalization;

  switch (sol.status) {
    case milp::MilpStatus::Optimal: result.status = InferenceStatus::Optimal; break;
    case milp::MilpStatus::Infeasible: result.status = InferenceStatus::Infeasible; break;
    case milp::MilpStatus::Unbounded:
      throw NumericalError("solveRdio: model unbounded; big-M bounds missing");
    case milp::MilpStatus::LimitReached:
      result.status = sol.x.empty() ? InferenceStatus::LimitReached
                                    : InferenceStatus::FeasibleIncumbent;
      break;
  }
  if (result.status == InferenceStatus::Infeasible ||
      result.status == InferenceStatus::LimitReached) {
    return result;
  }

  result.objectiveValue = sol.objective;
  result.A = Mat(L.numLinear, L.m);
  result.b.resize(L.numLinear);
  for (int ell = 0; ell < L.numLinear; ++ell) {
    for (int j = 0; j < L.m; ++j) result.A(ell, j) = sol.x[L.a(ell, j)];
    result.b[ell] = sol.x[L.bIdx[ell]];
  }
  for (const auto& idx : L.qIdx) {
    Vec q;
    for (int var : idx) q.push_back(sol.x[var]);
    result.q.push_back(std::move(q));
  }
  const int nCons = static_cast<int>(L.constraints.size());
  result.yPattern.assign(nCons, std::vector<int>(L.kMinus, 0));
  result.dInferred = Mat(nCons, std::max(L.kMinus, 0));
  result.z.resize(L.kMinus);
  for (int k = 0; k < L.kMinus; ++k) {
    for (int i = 0; i < nCons; ++i) {
      result.yPattern[i][k] = static_cast<int>(std::lround(sol.x[L.yIdx[i][k]]));
      if (L.dIdx[i][k] >= 0) result.dInferred(i, k) = sol.x[L.dIdx[i][k]];
    }
    result.z[k] = sol.x[L.zIdx[k]];
  }

  if (result.status == InferenceStatus::Optimal) {
    const Region nominalRegion = result.assembled(false);
    if (!isNominal(nominalRegion, layoutDataset(L), 1e-6, L.params.epsilon)) {
      throw NumericalError("solveRdio: optimal solution failed the nominality re-check");
    }
  }
  return result;
}

KktCertificate dioCertificate(const InferenceResult& result, const Region& knownWithTangent,
                              const Point& x0, const Objective& objective) {
  if (result.status != InferenceStatus::Optimal) {
    throw InputError("dioCertificate: requires an optimal inference result");
  }
  if (!knownWithTangent.tangent) {
    throw InputError("dioCertificate: known region lacks the tangent half-space");
  }
  KktCertificate cert;
  const std::size_t nTemplates = knownWithTangent.knownNonlinear.size() + result.q.size();
  const std::size_t nLinear = knownWithTangent.knownLinear.size() + result.b.size();
  cert.lambda.assign(nTemplates, 0.0);
  cert.mu.assign(nLinear, 0.0);
  cert.lambda0 = -1.0;

  // stationarity: grad f + lambda0 * (tangent normal) with all other
  // multipliers zero; the tangent normal is grad f(x0) by construction
  Vec residual = objective.gradient(x0);
  linalg::axpyInPlace(cert.lambda0, knownWithTangent.tangent->normal, residual);
  cert.stationarityResidual = linalg::normInf(residual);
  const double scale = 1.0 + linalg::normInf(objective.gradient(x0));
  if (cert.stationarityResidual > 1e-8 * scale) {
    throw CertificateError("dioCertificate: stationarity residual above 1e-8");
  }

  const double tangentSlack =
      linalg::dot(knownWithTangent.tangent->normal, x0) - knownWithTangent.tangent->offset;
  cert.maxComplementarity = std::fabs(cert.lambda0 * tangentSlack);
  if (cert.maxComplementarity > 1e-8 * (1.0 + std::fabs(knownWithTangent.tangent->offset))) {
    throw CertificateError("dioCertificate: tangent complementarity above 1e-8");
  }

  Region region = knownWithTangent;
  for (std::size_t ell = 0; ell < result.b.size(); ++ell) {
    Vec row(result.A.cols);
    for (std::size_t j = 0; j < result.A.cols; ++j) row[j] = result.A(ell, j);
    region.inferredLinear.push_back({std::move(row), result.b[ell]});
  }
  for (std::size_t n = 0; n < result.q.size(); ++n) {
    region.inferredNonlinear.push_back({result.templates[n], result.q[n]});
  }
  if (!regionContains(region, x0, 1e-8)) {
    throw CertificateError("dioCertificate: x0 is not primal feasible for the assembled region");
  }
  return cert;
}

bool verifyOptimality(const Region& region, const Objective& objective, const Point& x0,
                      double tol) {
  const auto box = geometry::defaultSearchBox(region, x0);
  const auto res = geometry::minimizeOverRegion(region, objective, box);
  if (res.value == -milp::kInfinity) {
    std::ostringstream out;
    out << "verifyOptimality: region unbounded along descent ray (";
    for (std::size_t j = 0; j < res.ray.size(); ++j) out << (j ? ", " : "") << res.ray[j];
    out << ")";
    throw NumericalError(out.str());
  }
  return res.lowerBound >= objective.value(x0) - tol;
}

int minConstraintUpperBound(const Dataset& dataset) {
  return static_cast<int>(dataset.rejectedCount()) + 1;
}

bool auditModelSize(const RdioProblem& problem, const Dataset& dataset, const Region& known,
                    const RdioConfig& config) {
  const RdioLayout& L = problem.layout;
  const milp::LpModel& M = problem.model;
  const int m = static_cast<int>(dataset.dimension());
  const int kp = static_cast<int>(dataset.acceptedCount());
  const int km = static_cast<int>(dataset.rejectedCount());
  const int nL = static_cast<int>(known.knownLinear.size());       // tangent excluded
  const int nN = static_cast<int>(known.knownNonlinear.size());
  const int nLt = config.numLinear;
  const int nNt = config.numTemplates();
  int phiSum = 0;
  for (const auto& tmpl : config.templates) phiSum += tmpl.paramDim();

  // expected counts from the published size formulas
  const long expContinuous = static_cast<long>(m + 1) * nLt + phiSum;
  const long expBinary = static_cast<long>(nN + nL + nNt + nLt) * km;
  const long expLinearRows = static_cast<long>(nLt) * (kp + 1) + static_cast<long>(nL + 1) * km;
  const long expTemplateRows = static_cast<long>(nNt) * (kp + km) + static_cast<long>(nN) * km;

  // actual counts from the built model
  long actContinuous = 0;
  for (int ell = 0; ell < L.numLinear; ++ell) {
    for (int j = 0; j < L.m; ++j) {
      if (M.binary[L.a(ell, j)]) throw AuditError("audit: coefficient variable flagged binary");
      ++actContinuous;
    }
    if (M.binary[L.bIdx[ell]]) throw AuditError("audit: offset variable flagged binary");
    ++actContinuous;
  }
  for (const auto& idx : L.qIdx) {
    for (int var : idx) {
      if (M.binary[var]) throw AuditError("audit: template parameter flagged binary");
      ++actContinuous;
    }
  }
  long actBinary = 0;
  for (std::size_t i = 0; i < L.constraints.size(); ++i) {
    if (L.constraints[i].kind == ConsKind::Tangent) continue;  // audited separately
    for (int k = 0; k < L.kMinus; ++k) {
      if (!M.binary[L.yIdx[i][k]]) throw AuditError("audit: y variable not flagged binary");
      ++actBinary;
    }
  }
  long actLinearRows = 0, actTemplateRows = 0;
  for (const auto& row : M.rows) {
    switch (row.tag) {
      case TagPrimalFeasLinear:
      case TagBigMKnownLinear:
      case TagCover:
      case TagNormMembership:
        ++actLinearRows;
        break;
      case TagPrimalFeasTemplate:
      case TagBigMKnownTemplate:
      case TagBigMInferredTemplate:
        ++actTemplateRows;
        break;
      default:
        break;
    }
  }

  auto fail = [](const char* what, long expected, long actual) {
    std::ostringstream out;
    out << "audit mismatch on " << what << ": expected " << expected << ", actual " << actual;
    throw AuditError(out.str());
  };
  if (actContinuous != expContinuous) fail("continuous variables", expContinuous, actContinuous);
  if (actBinary != expBinary) fail("binary variables", expBinary, actBinary);
  if (actLinearRows != expLinearRows) fail("base linear rows", expLinearRows, actLinearRows);
  if (actTemplateRows != expTemplateRows) fail("template-origin rows", expTemplateRows, actTemplateRows);
  return true;
}

}  // namespace rdio::inference
