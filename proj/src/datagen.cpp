#include "rdio/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rdio/geometry.hpp"
#include "rdio/util.hpp"

namespace rdio::datagen {

std::vector<GuidelineCriterion> guidelineTable() {
  using S = GuidelineCriterion::Sense;
  return {
      {"cavity1_min", 0, S::Min, 40.28},
      {"cavity2_min", 1, S::Min, 40.28},
      {"ctv99_min", 2, S::Min, 39.01},
      {"heart10cc_max", 3, S::Max, 38.16},
      {"lung45cc_max", 4, S::Max, 38.16},
      {"ctv05_max", 5, S::Max, 45.79},
      {"heart25cc_max", 6, S::Max, 21.20},
      {"lung25cc_max", 7, S::Max, 36.04},
  };
}

std::pair<std::vector<bool>, bool> checkGuidelines(const Point& plan,
                                                   const std::map<std::string, int>& mapping) {
  const auto table = guidelineTable();
  std::vector<bool> per;
  bool all = true;
  for (const auto& crit : table) {
    const auto it = mapping.find(crit.name);
    if (it == mapping.end()) {
      throw InputError("checkGuidelines: mapping misses criterion '" + crit.name + "'");
    }
    const int idx = it->second;
    if (idx < 0 || idx >= static_cast<int>(plan.size())) {
      throw InputError("checkGuidelines: mapped index out of range for '" + crit.name + "'");
    }
    const double v = plan[static_cast<std::size_t>(idx)];
    const bool ok = crit.sense == GuidelineCriterion::Sense::Min ? v >= crit.limitGy
                                                                 : v <= crit.limitGy;
    per.push_back(ok);
    all = all && ok;
  }
  return {per, all};
}

Dataset synthesizeCohort(const std::vector<Observation>& basePlans, int perBase, double perturb,
                         std::uint64_t seed, std::vector<std::size_t>* clippedOut) {
  if (perturb < 0.0 || perturb >= 1.0) throw InputError("synthesizeCohort: perturb must be in [0,1)");
  if (perBase < 0) throw InputError("synthesizeCohort: negative perBase");
  if (basePlans.empty()) throw InputError("synthesizeCohort: no base plans");
  Rng rng(seed);
  Dataset out;
  for (const auto& base : basePlans) {
    out.observations.push_back(base);
    for (int c = 0; c < perBase; ++c) {
      Observation synth;
      synth.label = base.label;
      synth.point.reserve(base.point.size());
      for (double v : base.point) {
        double perturbed = v * (1.0 + rng.uniform(-perturb, perturb));
        if (perturbed < 0.0) {
          perturbed = 0.0;
          if (clippedOut) clippedOut->push_back(out.observations.size());
        }
        synth.point.push_back(perturbed);
      }
      out.observations.push_back(std::move(synth));
    }
  }
  return out;
}

RtForwardConfig rtForwardConfig() {
  constexpr int m = 14;
  RtForwardConfig cfg;
  for (int j = 0; j < m; ++j) {
    Vec a(m, 0.0);
    a[static_cast<std::size_t>(j)] = 1.0;
    // first feature at least 10 Gy, every other dose nonnegative
    cfg.known.knownLinear.push_back({std::move(a), j == 0 ? 10.0 : 0.0});
  }
  Vec c(m, 0.0);
  c[9] = 1.0;
  c[10] = 1.0;
  cfg.objective = Objective::linear(std::move(c));
  cfg.numInferred = 10;
  cfg.featureNames = {"cavity1_min", "cavity2_min", "ctv99_min",      "heart10cc_max",
                      "lung45cc_max", "ctv05_max",  "heart25cc_max",  "lung25cc_max",
                      "aux1",         "heart_max",  "lung_max",       "aux2",
                      "aux3",         "aux4"};
  return cfg;
}

namespace {

// Row directions must stay representable under the l1-proxy normalization:
// coefficients in the unit box with |sum| scaled to one.
Vec representableNormal(Rng& rng, int m) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Vec u(m);
    double norm = 0.0;
    for (auto& v : u) {
      v = rng.normal();
      norm += v * v;
    }
    norm = std::sqrt(norm);
    if (norm < 1e-9) continue;
    for (auto& v : u) v /= norm;
    const double s = std::accumulate(u.begin(), u.end(), 0.0);
    if (std::fabs(s) < 0.35) continue;
    Vec a = linalg::scaled(u, 1.0 / std::fabs(s));
    if (linalg::normInf(a) > 0.98) continue;
    return a;
  }
  throw NumericalError("plantedInstance: could not sample a representable row normal");
}

}  // namespace

PlantedInstance plantedInstance(int m, int nTrue, int nAcc, int nRej, std::uint64_t seed) {
  if (m < 1 || m > 8) throw InputError("plantedInstance: m must be in [1, 8]");
  if (nTrue < 1 || nTrue > 12) throw InputError("plantedInstance: nTrue must be in [1, 12]");
  if (nAcc < 1 || nRej < 0) throw InputError("plantedInstance: need accepted points");

  Rng rng(seed);
  const double boxLo = 0.0, boxHi = 10.0;

  for (int regionAttempt = 0; regionAttempt < 40; ++regionAttempt) {
    Point center(m);
    for (auto& v : center) v = rng.uniform(4.0, 6.0);
    std::vector<LinearConstraint> rows;
    for (int r = 0; r < nTrue; ++r) {
      Vec a = representableNormal(rng, m);
      const double slack = rng.uniform(1.2, 2.5);
      rows.push_back({a, linalg::dot(a, center) - slack});
    }

    auto stepLimit = [&](const Point& from, const Vec& dir) {
      double tMax = std::numeric_limits<double>::infinity();
      for (const auto& row : rows) {
        const double av = linalg::dot(row.a, dir);
        if (av < -1e-12) tMax = std::min(tMax, (linalg::dot(row.a, from) - row.b) / -av);
      }
      for (int j = 0; j < m; ++j) {
        if (dir[j] > 1e-12) tMax = std::min(tMax, (boxHi - from[j]) / dir[j]);
        if (dir[j] < -1e-12) tMax = std::min(tMax, (from[j] - boxLo) / -dir[j]);
      }
      return tMax;
    };
    auto randomDirection = [&]() {
      Vec v(m);
      double norm = 0.0;
      for (auto& d : v) {
        d = rng.normal();
        norm += d * d;
      }
      norm = std::sqrt(std::max(norm, 1e-12));
      for (auto& d : v) d /= norm;
      return v;
    };

    // accepted points: star sampling from the center, biased toward the
    // boundary so the sample hull fills the region
    std::vector<Point> accepted;
    for (int k = 0; k < nAcc; ++k) {
      const Vec dir = randomDirection();
      const double tMax = stepLimit(center, dir);
      if (!std::isfinite(tMax) || tMax < 1e-6) break;
      const double rho = tMax * std::pow(rng.uniform(), 0.45);
      Point p = center;
      linalg::axpyInPlace(rho, dir, p);
      accepted.push_back(std::move(p));
    }
    if (static_cast<int>(accepted.size()) < nAcc) continue;

    // rejected points: beyond a face, clearly violating it, never inside a
    // thin band of any other row
    std::vector<Point> rejected;
    bool ok = true;
    for (int k = 0; k < nRej && ok; ++k) {
      bool placed = false;
      for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
        const Vec dir = randomDirection();
        const double tMax = stepLimit(center, dir);
        if (!std::isfinite(tMax) || tMax < 0.5) continue;
        Point boundary = center;
        linalg::axpyInPlace(tMax, dir, boundary);
        // the blocking row at the boundary point (slack ~ 0 there)
        int face = -1;
        double best = 1e-6;
        for (int r = 0; r < nTrue; ++r) {
          const double s = std::fabs(rows[r].slack(boundary));
          if (s < best) { best = s; face = r; }
        }
        if (face < 0) continue;  // hit the data box, not a region face
        const double dist = rng.uniform(0.3, 1.2);
        const double a2 = linalg::dot(rows[face].a, rows[face].a);
        Point p = boundary;
        linalg::axpyInPlace(-dist / a2, rows[face].a, p);
        bool valid = true;
        for (int j = 0; j < m && valid; ++j) {
          valid = p[j] >= boxLo - 1.0 && p[j] <= boxHi + 1.0;
        }
        if (!valid) continue;
        // clear of every row's (0, band) margin strip
        for (const auto& row : rows) {
          const double violation = -row.slack(p);
          if (violation > 1e-9 && violation < 0.1) { valid = false; break; }
        }
        if (!valid) continue;
        if (-rows[face].slack(p) < 0.25) continue;
        rejected.push_back(std::move(p));
        placed = true;
      }
      ok = placed;
    }
    if (!ok) continue;

    // outside the region implies outside the accepted hull; verify anyway
    bool hullClean = true;
    for (const auto& p : rejected) {
      if (geometry::hullMembership(p, accepted, 1e-7)) { hullClean = false; break; }
    }
    if (!hullClean) continue;

    PlantedInstance inst;
    inst.seed = seed;
    inst.trueRegion.inferredLinear = rows;
    for (auto& p : accepted) inst.dataset.observations.push_back({std::move(p), Label::Accepted});
    for (auto& p : rejected) inst.dataset.observations.push_back({std::move(p), Label::Rejected});
    for (int j = 0; j < m; ++j) inst.dataset.featureNames.push_back("f" + std::to_string(j + 1));
    return inst;
  }
  throw NumericalError("plantedInstance: sampling failed for this seed; retry with another seed");
}

}  // namespace rdio::datagen
