#include "rdio/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "rdio/kernels.hpp"
#include "rdio/util.hpp"

namespace rdio::milp {

int LpModel::addVar(double lo, double hi, double obj, bool isBinary, std::string name) {
  if (lo > hi) throw InputError("addVar: lower bound above upper bound");
  if (isBinary && (lo < -1e-12 || hi > 1.0 + 1e-12)) {
    throw InputError("addVar: binary variable must have bounds within [0,1]");
  }
  lower.push_back(lo);
  upper.push_back(hi);
  objective.push_back(obj);
  binary.push_back(isBinary);
  names.push_back(std::move(name));
  return numVars() - 1;
}

void LpModel::addRow(std::vector<std::pair<int, double>> coeffs, RowSense s, double rhs, int tag) {
  for (const auto& [j, v] : coeffs) {
    (void)v;
    if (j < 0 || j >= numVars()) throw InputError("addRow: coefficient references unknown variable");
  }
  rows.push_back(Row{std::move(coeffs), s, rhs, tag});
}

double rowActivity(const Row& row, const Vec& x) {
  double act = 0.0;
  for (const auto& [j, v] : row.coeffs) act += v * x[static_cast<std::size_t>(j)];
  return act;
}

double maxViolation(const LpModel& model, const Vec& x) {
  if (static_cast<int>(x.size()) != model.numVars()) {
    throw InputError("maxViolation: solution length mismatch");
  }
  double worst = 0.0;
  for (int j = 0; j < model.numVars(); ++j) {
    worst = std::max(worst, model.lower[j] - x[j]);
    worst = std::max(worst, x[j] - model.upper[j]);
  }
  for (const auto& row : model.rows) {
    const double act = rowActivity(row, x);
    switch (row.sense) {
      case RowSense::LessEqual: worst = std::max(worst, act - row.rhs); break;
      case RowSense::GreaterEqual: worst = std::max(worst, row.rhs - act); break;
      case RowSense::Equal: worst = std::max(worst, std::fabs(act - row.rhs)); break;
    }
  }
  return worst;
}

double dualityGap(const LpModel& model, const LpSolution& sol) {
  if (sol.status != LpStatus::Optimal) throw InputError("dualityGap: solution not optimal");
  double dual = 0.0;
  for (std::size_t i = 0; i < model.rows.size(); ++i) dual += sol.rowDuals[i] * model.rows[i].rhs;
  for (int j = 0; j < model.numVars(); ++j) dual += sol.reducedCosts[j] * sol.x[j];
  return std::fabs(sol.objective - dual) / (1.0 + std::fabs(sol.objective));
}

namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-11;

/// Bounded-variable primal simplex with a composite (artificial-free) phase 1.
/// Columns 0..n-1 are structural, n..n+m-1 are row slacks.
class Simplex {
 public:
  explicit Simplex(const LpModel& model) : model_(model) {
    n_ = model.numVars();
    m_ = static_cast<int>(model.rows.size());
    total_ = n_ + m_;
    maximize_ = model.sense == ObjSense::Maximize;

    lo_.resize(total_);
    hi_.resize(total_);
    cost_.assign(total_, 0.0);
    cols_.resize(total_);
    rhs_.resize(m_);

    for (int j = 0; j < n_; ++j) {
      lo_[j] = model.lower[j];
      hi_[j] = model.upper[j];
      cost_[j] = maximize_ ? -model.objective[j] : model.objective[j];
    }
    for (int i = 0; i < m_; ++i) {
      const Row& row = model.rows[i];
      rhs_[i] = row.rhs;
      for (const auto& [j, v] : row.coeffs) {
        if (v != 0.0) cols_[j].push_back({i, v});
      }
      const int sj = n_ + i;
      cols_[sj].push_back({i, 1.0});
      switch (row.sense) {
        case RowSense::LessEqual: lo_[sj] = 0.0; hi_[sj] = kInfinity; break;
        case RowSense::GreaterEqual: lo_[sj] = -kInfinity; hi_[sj] = 0.0; break;
        case RowSense::Equal: lo_[sj] = 0.0; hi_[sj] = 0.0; break;
      }
    }
  }

  LpSolution solve() {
    // self-healing ladder: a failed attempt retries with Bland pricing and
    // tighter refactorization before giving up
    std::string lastError;
    for (attempt_ = 0; attempt_ < 3; ++attempt_) {
      try {
        initBasis();
        LpSolution out;
        if (!phase1()) {
          out.status = LpStatus::Infeasible;
          return out;
        }
        const Phase2Result p2 = phase2();
        if (p2.unbounded) {
          out.status = LpStatus::Unbounded;
          out.ray = p2.ray;
          return out;
        }
        extract(out);
        if (maxViolation(model_, out.x) <= 1e-8) return out;
        lastError = "residual above tolerance";
      } catch (const NumericalError& err) {
        lastError = err.what();
      }
    }
    throw NumericalError("simplex: stalled after anti-cycling retries (" + lastError + ")");
  }

 private:
  enum class State : unsigned char { Basic, AtLower, AtUpper, FreeZero };

  struct Phase2Result {
    bool unbounded = false;
    Vec ray;
  };

  const LpModel& model_;
  int n_ = 0, m_ = 0, total_ = 0;
  bool maximize_ = false;
  std::vector<double> lo_, hi_, cost_, rhs_;
  std::vector<std::vector<std::pair<int, double>>> cols_;

  std::vector<State> state_;
  std::vector<int> basis_;      // column occupying each basic row position
  std::vector<double> binv_;    // m x m row-major
  std::vector<double> xb_;      // basic values
  int iterations_ = 0;
  int degenerate_ = 0;
  bool bland_ = false;
  int attempt_ = 0;

  double& binvAt(int i, int j) { return binv_[static_cast<std::size_t>(i) * m_ + j]; }
  double binvAt(int i, int j) const { return binv_[static_cast<std::size_t>(i) * m_ + j]; }

  double nonbasicValue(int j) const {
    switch (state_[j]) {
      case State::AtLower: return lo_[j];
      case State::AtUpper: return hi_[j];
      default: return 0.0;
    }
  }

  void initBasis() {
    state_.assign(total_, State::AtLower);
    for (int j = 0; j < total_; ++j) {
      const bool lf = std::isfinite(lo_[j]);
      const bool uf = std::isfinite(hi_[j]);
      if (lf && uf) {
        state_[j] = std::fabs(lo_[j]) <= std::fabs(hi_[j]) ? State::AtLower : State::AtUpper;
      } else if (lf) {
        state_[j] = State::AtLower;
      } else if (uf) {
        state_[j] = State::AtUpper;
      } else {
        state_[j] = State::FreeZero;
      }
    }
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      state_[n_ + i] = State::Basic;
    }
    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) binvAt(i, i) = 1.0;
    computeXb();
    iterations_ = 0;
    degenerate_ = 0;
    bland_ = attempt_ > 0;
  }

  void computeXb() {
    std::vector<double> r = rhs_;
    for (int j = 0; j < total_; ++j) {
      if (state_[j] == State::Basic) continue;
      const double v = nonbasicValue(j);
      if (v == 0.0) continue;
      for (const auto& [i, a] : cols_[j]) r[i] -= a * v;
    }
    xb_.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      xb_[i] = kernels::dot(&binv_[static_cast<std::size_t>(i) * m_], r.data(), m_);
    }
  }

  void refactorize() {
    if (m_ == 0) return;
    // Gauss-Jordan inversion of the basis matrix with partial pivoting.
    std::vector<double> aug(static_cast<std::size_t>(m_) * 2 * m_, 0.0);
    const int w = 2 * m_;
    for (int i = 0; i < m_; ++i) aug[static_cast<std::size_t>(i) * w + m_ + i] = 1.0;
    for (int p = 0; p < m_; ++p) {
      for (const auto& [i, a] : cols_[basis_[p]]) aug[static_cast<std::size_t>(i) * w + p] = a;
    }
    for (int c = 0; c < m_; ++c) {
      int piv = -1;
      double best = 1e-12;
      for (int r = c; r < m_; ++r) {
        const double v = std::fabs(aug[static_cast<std::size_t>(r) * w + c]);
        if (v > best) { best = v; piv = r; }
      }
      if (piv < 0) throw NumericalError("simplex: singular basis during refactorization");
      if (piv != c) {
        for (int k = 0; k < w; ++k) std::swap(aug[static_cast<std::size_t>(piv) * w + k], aug[static_cast<std::size_t>(c) * w + k]);
      }
      const double d = aug[static_cast<std::size_t>(c) * w + c];
      kernels::scale(1.0 / d, &aug[static_cast<std::size_t>(c) * w], w);
      for (int r = 0; r < m_; ++r) {
        if (r == c) continue;
        const double f = aug[static_cast<std::size_t>(r) * w + c];
        if (f != 0.0) kernels::axpy(-f, &aug[static_cast<std::size_t>(c) * w], &aug[static_cast<std::size_t>(r) * w], w);
      }
    }
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < m_; ++j) binvAt(i, j) = aug[static_cast<std::size_t>(i) * w + m_ + j];
    }
  }

  std::vector<double> ftran(int col) const {
    std::vector<double> alpha(m_, 0.0);
    for (const auto& [i, a] : cols_[col]) {
      for (int r = 0; r < m_; ++r) alpha[r] += binvAt(r, i) * a;
    }
    return alpha;
  }

  // y = Binv' * w where w is indexed by basic row position.
  std::vector<double> btran(const std::vector<double>& w) const {
    std::vector<double> y(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      if (w[i] != 0.0) kernels::axpy(w[i], &binv_[static_cast<std::size_t>(i) * m_], y.data(), m_);
    }
    return y;
  }

  double colDotY(int j, const std::vector<double>& y) const {
    double acc = 0.0;
    for (const auto& [i, a] : cols_[j]) acc += y[i] * a;
    return acc;
  }

  double maxInfeasibility() const {
    double worst = 0.0;
    for (int i = 0; i < m_; ++i) {
      const int c = basis_[i];
      worst = std::max(worst, lo_[c] - xb_[i]);
      worst = std::max(worst, xb_[i] - hi_[c]);
    }
    return worst;
  }

  int maxIterations() const { return 2000 + 80 * (m_ + n_); }

  void bumpIteration(double step) {
    ++iterations_;
    if (iterations_ > maxIterations()) {
      throw NumericalError("simplex: iteration limit (anti-cycling exhausted)");
    }
    if (step < 1e-11) {
      if (++degenerate_ > 40) bland_ = true;  // Bland's rule until progress resumes
    } else {
      degenerate_ = 0;
      bland_ = attempt_ > 0;  // retries keep Bland pricing throughout
    }
    const int cadence = attempt_ >= 2 ? 10 : 50;
    if (iterations_ % cadence == 0) {
      refactorize();
      computeXb();
    }
  }

  struct RatioResult {
    double t = kInfinity;
    int row = -1;        // leaving basic row, or -1 for a bound flip
    bool toUpper = false;  // bound the leaving variable exits at
  };

  // Blocking event as the entering column moves by dir * t, t >= 0.
  // Harris two-pass: a relaxed pass sets the step window, the second pass
  // picks the largest pivot inside it, which keeps the basis well
  // conditioned. Infeasible basics block at the bound they violate (phase 1).
  RatioResult ratioTest(const std::vector<double>& alpha, int entering, int dir, bool phase1) {
    struct Event { double t; double tRelaxed; int row; bool toUpper; double mag; };
    std::vector<Event> events;
    events.reserve(8);
    constexpr double kExpand = 1e-8;  // bound slack granted during pass one
    double tExactMin = kInfinity;
    double tRelaxedMin = kInfinity;
    for (int i = 0; i < m_; ++i) {
      const double change = -dir * alpha[i];
      if (std::fabs(change) <= kPivotTol) continue;
      const int c = basis_[i];
      const double v = xb_[i];
      const double l = lo_[c], u = hi_[c];
      double t = kInfinity;
      bool toUpper = false;
      if (phase1 && v < l - kFeasTol) {
        if (change > 0) { t = (l - v) / change; toUpper = false; }
      } else if (phase1 && v > u + kFeasTol) {
        if (change < 0) { t = (v - u) / (-change); toUpper = true; }
      } else {
        if (change < 0 && std::isfinite(l)) { t = (v - l) / (-change); toUpper = false; }
        else if (change > 0 && std::isfinite(u)) { t = (u - v) / change; toUpper = true; }
      }
      if (t < kInfinity) {
        t = std::max(t, 0.0);
        const double tRelaxed = t + kExpand / std::fabs(change);
        events.push_back({t, tRelaxed, i, toUpper, std::fabs(alpha[i])});
        tExactMin = std::min(tExactMin, t);
        tRelaxedMin = std::min(tRelaxedMin, tRelaxed);
      }
    }
    RatioResult res;
    const double range = hi_[entering] - lo_[entering];
    const double tFlip = (state_[entering] != State::FreeZero && std::isfinite(range)) ? range : kInfinity;
    if (tFlip <= tExactMin) {  // a bound flip needs no pivot at all
      res.t = tFlip;
      res.row = -1;
      return res;
    }
    if (events.empty()) return res;  // t == inf signals an unbounded direction
    const Event* chosen = nullptr;
    for (const auto& e : events) {
      if (e.t > tRelaxedMin) continue;
      if (!chosen) { chosen = &e; continue; }
      if (bland_) {
        if (basis_[e.row] < basis_[chosen->row]) chosen = &e;
      } else if (e.mag > chosen->mag) {
        chosen = &e;
      }
    }
    // chosen->t <= every event's relaxed limit, so the leaving variable
    // exits exactly at its bound and no other basic strays beyond kExpand
    res.t = chosen->t;
    res.row = chosen->row;
    res.toUpper = chosen->toUpper;
    return res;
  }

  void applyStep(int entering, int dir, const std::vector<double>& alpha, const RatioResult& rr) {
    const double t = rr.t;
    if (rr.row < 0) {
      // bound flip, basis unchanged
      for (int i = 0; i < m_; ++i) xb_[i] -= dir * alpha[i] * t;
      state_[entering] = (state_[entering] == State::AtLower) ? State::AtUpper : State::AtLower;
      bumpIteration(t);
      return;
    }
    const int r = rr.row;
    const int leaving = basis_[r];
    const double enterVal = nonbasicValue(entering) + dir * t;
    for (int i = 0; i < m_; ++i) xb_[i] -= dir * alpha[i] * t;
    // eta update of Binv
    const double pivot = alpha[r];
    if (std::getenv("RDIO_SIMPLEX_PARANOID") && std::fabs(pivot) < 1e-6) {
      std::fprintf(stderr, "paranoid: iter %d tiny pivot %.3e (t=%.3e)\n", iterations_, pivot, t);
    }
    if (std::fabs(pivot) < kPivotTol) throw NumericalError("simplex: vanishing pivot");
    kernels::scale(1.0 / pivot, &binv_[static_cast<std::size_t>(r) * m_], m_);
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = alpha[i];
      if (f != 0.0) kernels::axpy(-f, &binv_[static_cast<std::size_t>(r) * m_], &binv_[static_cast<std::size_t>(i) * m_], m_);
    }
    basis_[r] = entering;
    state_[entering] = State::Basic;
    state_[leaving] = rr.toUpper ? State::AtUpper : State::AtLower;
    xb_[r] = enterVal;
    bumpIteration(t);
  }

  bool eligibleEntering(int j) const {
    if (state_[j] == State::Basic) return false;
    if (hi_[j] - lo_[j] < 1e-15) return false;  // fixed
    return true;
  }

  // phase 1: drive the composite infeasibility to zero; false when the
  // model is proven infeasible.
  bool phase1() {
    while (true) {
      if (maxInfeasibility() <= kFeasTol) return true;
      std::vector<double> w(m_, 0.0);
      for (int i = 0; i < m_; ++i) {
        const int c = basis_[i];
        if (xb_[i] < lo_[c] - kFeasTol) w[i] = -1.0;
        else if (xb_[i] > hi_[c] + kFeasTol) w[i] = 1.0;
      }
      const std::vector<double> y = btran(w);
      int entering = -1, dir = 0;
      double best = kDualTol;
      for (int j = 0; j < total_; ++j) {
        if (!eligibleEntering(j)) continue;
        const double rc = colDotY(j, y);  // rate of infeasibility per unit increase is -rc
        int d = 0;
        double score = 0.0;
        if (state_[j] == State::AtLower && rc > kDualTol) { d = 1; score = rc; }
        else if (state_[j] == State::AtUpper && rc < -kDualTol) { d = -1; score = -rc; }
        else if (state_[j] == State::FreeZero && std::fabs(rc) > kDualTol) { d = rc > 0 ? 1 : -1; score = std::fabs(rc); }
        if (d != 0) {
          if (bland_) { entering = j; dir = d; break; }
          if (score > best) { best = score; entering = j; dir = d; }
        }
      }
      if (entering < 0) {
        return maxInfeasibility() <= 20.0 * kFeasTol;
      }
      const std::vector<double> alpha = ftran(entering);
      const RatioResult rr = ratioTest(alpha, entering, dir, true);
      if (rr.t == kInfinity) {
        throw NumericalError("simplex: phase-1 step unbounded");
      }
      applyStep(entering, dir, alpha, rr);
    }
  }

  Phase2Result phase2() {
    Phase2Result res;
    while (true) {
      if (std::getenv("RDIO_SIMPLEX_PARANOID")) {
        const double infeas = maxInfeasibility();
        if (infeas > 1e-6) {
          std::fprintf(stderr, "paranoid: phase2 iter %d infeasibility %.3e\n", iterations_, infeas);
        }
      }
      std::vector<double> cb(m_, 0.0);
      for (int i = 0; i < m_; ++i) cb[i] = cost_[basis_[i]];
      const std::vector<double> y = btran(cb);
      int entering = -1, dir = 0;
      double best = kDualTol;
      for (int j = 0; j < total_; ++j) {
        if (!eligibleEntering(j)) continue;
        const double rc = cost_[j] - colDotY(j, y);
        int d = 0;
        double score = 0.0;
        if (state_[j] == State::AtLower && rc < -kDualTol) { d = 1; score = -rc; }
        else if (state_[j] == State::AtUpper && rc > kDualTol) { d = -1; score = rc; }
        else if (state_[j] == State::FreeZero && std::fabs(rc) > kDualTol) { d = rc < 0 ? 1 : -1; score = std::fabs(rc); }
        if (d != 0) {
          if (bland_) { entering = j; dir = d; break; }
          if (score > best) { best = score; entering = j; dir = d; }
        }
      }
      if (entering < 0) return res;  // optimal
      const std::vector<double> alpha = ftran(entering);
      const RatioResult rr = ratioTest(alpha, entering, dir, false);
      if (rr.t == kInfinity) {
        res.unbounded = true;
        res.ray.assign(n_, 0.0);
        if (entering < n_) res.ray[entering] = dir;
        for (int i = 0; i < m_; ++i) {
          const int c = basis_[i];
          if (c < n_ && std::fabs(alpha[i]) > kPivotTol) res.ray[c] = -dir * alpha[i];
        }
        return res;
      }
      applyStep(entering, dir, alpha, rr);
    }
  }

  void extract(LpSolution& out) {
    refactorize();
    computeXb();
    out.status = LpStatus::Optimal;
    out.iterations = iterations_;
    Vec full(total_, 0.0);
    for (int j = 0; j < total_; ++j) {
      if (state_[j] != State::Basic) full[j] = nonbasicValue(j);
    }
    for (int i = 0; i < m_; ++i) full[basis_[i]] = xb_[i];
    out.x.assign(full.begin(), full.begin() + n_);

    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += cost_[j] * full[j];
    out.objective = maximize_ ? -obj : obj;

    std::vector<double> cb(m_, 0.0);
    for (int i = 0; i < m_; ++i) cb[i] = cost_[basis_[i]];
    const std::vector<double> y = btran(cb);
    out.rowDuals.resize(m_);
    out.reducedCosts.resize(n_);
    const double flip = maximize_ ? -1.0 : 1.0;
    for (int i = 0; i < m_; ++i) out.rowDuals[i] = flip * y[i];
    for (int j = 0; j < n_; ++j) out.reducedCosts[j] = flip * (cost_[j] - colDotY(j, y));
  }
};

}  // namespace

LpSolution solveLp(const LpModel& model) {
  for (int j = 0; j < model.numVars(); ++j) {
    if (model.lower[j] > model.upper[j]) return LpSolution{};  // infeasible bounds
  }
  if (model.numVars() == 0) {
    LpSolution out;
    bool ok = true;
    for (const auto& row : model.rows) {
      const double act = 0.0;
      if ((row.sense == RowSense::LessEqual && act > row.rhs + kFeasTol) ||
          (row.sense == RowSense::GreaterEqual && act < row.rhs - kFeasTol) ||
          (row.sense == RowSense::Equal && std::fabs(act - row.rhs) > kFeasTol)) {
        ok = false;
      }
    }
    out.status = ok ? LpStatus::Optimal : LpStatus::Infeasible;
    return out;
  }
  Simplex solver(model);
  LpSolution sol = solver.solve();
  if (sol.status == LpStatus::Optimal) {
    const double viol = maxViolation(model, sol.x);
    if (viol > 1e-7) {
      if (const char* dump = std::getenv("RDIO_DUMP_FAILING_LP")) {
        std::ofstream out(dump, std::ios::trunc);
        writeLpFormat(model, out);
      }
      throw NumericalError("simplex: solution failed re-verification (residual " +
                           std::to_string(viol) + ")");
    }
  }
  return sol;
}

namespace {

struct NodeBounds {
  Vec lower, upper;
  double estimate;  // parent LP bound in min-sense
};

/// Activity-based bound tightening; false when the node is proven infeasible.
bool propagateBounds(const LpModel& model, Vec& lo, Vec& hi) {
  const int n = model.numVars();
  for (int round = 0; round < 6; ++round) {
    bool changed = false;
    for (const auto& row : model.rows) {
      // finite min/max activity plus infinity bookkeeping
      double minAct = 0.0, maxAct = 0.0;
      int minInf = 0, maxInf = 0;
      for (const auto& [j, c] : row.coeffs) {
        const double l = lo[j], u = hi[j];
        if (c > 0) {
          if (std::isfinite(l)) minAct += c * l; else ++minInf;
          if (std::isfinite(u)) maxAct += c * u; else ++maxInf;
        } else {
          if (std::isfinite(u)) minAct += c * u; else ++minInf;
          if (std::isfinite(l)) maxAct += c * l; else ++maxInf;
        }
      }
      const bool upperSide = row.sense != RowSense::GreaterEqual;  // activity <= rhs applies
      const bool lowerSide = row.sense != RowSense::LessEqual;     // activity >= rhs applies
      if (upperSide && minInf == 0 && minAct > row.rhs + 1e-7) return false;
      if (lowerSide && maxInf == 0 && maxAct < row.rhs - 1e-7) return false;
      for (const auto& [j, c] : row.coeffs) {
        if (c == 0.0) continue;
        const double l = lo[j], u = hi[j];
        // activity <= rhs: bound j using the minimum activity of the others
        if (upperSide) {
          double others = minAct;
          int inf = minInf;
          if (c > 0) { if (std::isfinite(l)) others -= c * l; else --inf; }
          else { if (std::isfinite(u)) others -= c * u; else --inf; }
          if (inf == 0) {
            const double room = row.rhs - others;
            if (c > 0) {
              const double nu = room / c;
              if (nu < hi[j] - 1e-12) { hi[j] = nu; changed = true; }
            } else {
              const double nl = room / c;
              if (nl > lo[j] + 1e-12) { lo[j] = nl; changed = true; }
            }
          }
        }
        // activity >= rhs: bound j using the maximum activity of the others
        if (lowerSide) {
          double others = maxAct;
          int inf = maxInf;
          if (c > 0) { if (std::isfinite(u)) others -= c * u; else --inf; }
          else { if (std::isfinite(l)) others -= c * l; else --inf; }
          if (inf == 0) {
            const double need = row.rhs - others;
            if (c > 0) {
              const double nl = need / c;
              if (nl > lo[j] + 1e-12) { lo[j] = nl; changed = true; }
            } else {
              const double nu = need / c;
              if (nu < hi[j] - 1e-12) { hi[j] = nu; changed = true; }
            }
          }
        }
      }
    }
    for (int j = 0; j < n; ++j) {
      if (model.binary[j]) {
        if (lo[j] > 1e-7) lo[j] = 1.0;
        else if (lo[j] > 0.0) lo[j] = 0.0;
        if (hi[j] < 1.0 - 1e-7) hi[j] = 0.0;
        else if (hi[j] < 1.0) hi[j] = 1.0;
      }
      if (lo[j] > hi[j] + 1e-9) return false;
    }
    if (!changed) break;
  }
  return true;
}

double objectiveValue(const LpModel& model, const Vec& x) {
  double obj = 0.0;
  for (int j = 0; j < model.numVars(); ++j) obj += model.objective[j] * x[j];
  return obj;
}

}  // namespace

MilpSolution solveMilp(const LpModel& model, const SolverOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const bool maximize = model.sense == ObjSense::Maximize;
  const double flip = maximize ? -1.0 : 1.0;  // work in min-sense internally

  MilpSolution out;
  LpModel scratch = model;

  bool haveIncumbent = false;
  double incVal = kInfinity;  // min-sense
  Vec incX;

  if (options.warmStart) {
    const Vec& ws = *options.warmStart;
    if (static_cast<int>(ws.size()) == model.numVars() && maxViolation(model, ws) <= 1e-7) {
      bool integral = true;
      for (int j = 0; j < model.numVars() && integral; ++j) {
        if (model.binary[j] && std::fabs(ws[j] - std::round(ws[j])) > options.intTol) integral = false;
      }
      if (integral) {
        haveIncumbent = true;
        incX = ws;
        incVal = flip * objectiveValue(model, ws);
      }
    }
  }

  std::vector<NodeBounds> stack;
  stack.push_back({model.lower, model.upper, -kInfinity});
  double openBound = kInfinity;  // best LP bound among pruned-by-limit nodes
  bool limitHit = false;
  bool sawUnbounded = false;

  while (!stack.empty()) {
    if (options.nodeLimit >= 0 && out.nodes >= options.nodeLimit) { limitHit = true; break; }
    if (options.timeLimitSec >= 0) {
      const double sec = std::chrono::duration<double>(Clock::now() - start).count();
      if (sec > options.timeLimitSec) { limitHit = true; break; }
    }
    NodeBounds node = std::move(stack.back());
    stack.pop_back();
    ++out.nodes;

    if (haveIncumbent && node.estimate >= incVal - std::max(options.gapTol, 1e-9)) continue;
    if (!propagateBounds(scratch, node.lower, node.upper)) continue;

    scratch.lower = node.lower;
    scratch.upper = node.upper;
    ++out.lpSolves;
    const LpSolution lp = solveLp(scratch);
    if (lp.status == LpStatus::Infeasible) continue;
    if (lp.status == LpStatus::Unbounded) { sawUnbounded = true; break; }
    const double bound = flip * lp.objective;
    if (haveIncumbent && bound >= incVal - std::max(options.gapTol, 1e-9)) continue;

    int branchVar = -1;
    double branchScore = -1.0;
    for (int j = 0; j < model.numVars(); ++j) {
      if (!model.binary[j]) continue;
      const double frac = std::fabs(lp.x[j] - std::round(lp.x[j]));
      if (frac > options.intTol) {
        if (options.branchRule == BranchRule::FirstFractional) { branchVar = j; break; }
        const double score = 0.5 - std::fabs(lp.x[j] - 0.5);  // distance from integrality
        if (score > branchScore) { branchScore = score; branchVar = j; }
      }
    }

    if (branchVar < 0) {
      // integral: re-solve with binaries pinned for a clean incumbent
      Vec cl = node.lower, cu = node.upper;
      for (int j = 0; j < model.numVars(); ++j) {
        if (model.binary[j]) {
          const double r = std::round(lp.x[j]);
          cl[j] = r;
          cu[j] = r;
        }
      }
      scratch.lower = cl;
      scratch.upper = cu;
      ++out.lpSolves;
      const LpSolution fixed = solveLp(scratch);
      if (fixed.status == LpStatus::Optimal) {
        const double val = flip * fixed.objective;
        if (!haveIncumbent || val < incVal - 1e-12) {
          haveIncumbent = true;
          incVal = val;
          incX = fixed.x;
        }
      }
      continue;
    }

    const double frac = lp.x[branchVar];
    const int nearSide = frac >= 0.5 ? 1 : 0;
    NodeBounds far = node;
    far.estimate = bound;
    far.lower[branchVar] = 1.0 - nearSide;
    far.upper[branchVar] = 1.0 - nearSide;
    NodeBounds near = std::move(node);
    near.estimate = bound;
    near.lower[branchVar] = nearSide;
    near.upper[branchVar] = nearSide;
    stack.push_back(std::move(far));
    stack.push_back(std::move(near));  // dive toward the LP value first
  }

  for (const auto& nb : stack) openBound = std::min(openBound, nb.estimate);
  out.wallSec = std::chrono::duration<double>(Clock::now() - start).count();

  if (sawUnbounded) {
    out.status = MilpStatus::Unbounded;
    return out;
  }
  if (limitHit) {
    out.status = MilpStatus::LimitReached;
    if (haveIncumbent) {
      out.x = incX;
      out.objective = flip * incVal;
    }
    out.bestBound = flip * std::min(openBound, incVal);
    return out;
  }
  if (!haveIncumbent) {
    out.status = MilpStatus::Infeasible;
    return out;
  }
  out.status = MilpStatus::Optimal;
  out.x = incX;
  out.objective = flip * incVal;
  out.bestBound = out.objective;
  return out;
}

MilpSolution bruteForceMilp(const LpModel& model) {
  std::vector<int> bins;
  for (int j = 0; j < model.numVars(); ++j) {
    if (model.binary[j]) bins.push_back(j);
  }
  if (bins.size() > 20) throw InputError("bruteForceMilp: more than 20 binaries refused");

  const bool maximize = model.sense == ObjSense::Maximize;
  const double flip = maximize ? -1.0 : 1.0;
  MilpSolution out;
  LpModel scratch = model;
  bool found = false;
  double bestVal = kInfinity;

  const std::uint64_t count = 1ULL << bins.size();
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    scratch.lower = model.lower;
    scratch.upper = model.upper;
    for (std::size_t t = 0; t < bins.size(); ++t) {
      const double v = (mask >> t) & 1ULL ? 1.0 : 0.0;
      scratch.lower[bins[t]] = v;
      scratch.upper[bins[t]] = v;
    }
    ++out.lpSolves;
    const LpSolution lp = solveLp(scratch);
    if (lp.status == LpStatus::Unbounded) {
      out.status = MilpStatus::Unbounded;
      return out;
    }
    if (lp.status != LpStatus::Optimal) continue;
    const double val = flip * lp.objective;
    if (!found || val < bestVal - 1e-12) {
      found = true;
      bestVal = val;
      out.x = lp.x;
    }
  }
  out.nodes = static_cast<long>(count);
  if (!found) {
    out.status = MilpStatus::Infeasible;
    return out;
  }
  out.status = MilpStatus::Optimal;
  out.objective = flip * bestVal;
  out.bestBound = out.objective;
  return out;
}

namespace {

std::string varName(const LpModel& model, int j) {
  if (!model.names[j].empty()) return model.names[j];
  char buf[32];
  std::snprintf(buf, sizeof(buf), "x%d", j);
  return buf;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void writeLpFormat(const LpModel& model, std::ostream& out) {
  out << (model.sense == ObjSense::Maximize ? "Maximize" : "Minimize") << "\n obj:";
  bool first = true;
  for (int j = 0; j < model.numVars(); ++j) {
    const double c = model.objective[j];
    if (c == 0.0) continue;
    out << (c < 0 ? " - " : (first ? " " : " + ")) << num(std::fabs(c)) << " " << varName(model, j);
    first = false;
  }
  if (first) out << " 0 " << varName(model, 0);
  out << "\nSubject To\n";
  for (std::size_t i = 0; i < model.rows.size(); ++i) {
    const Row& row = model.rows[i];
    out << " c" << i << ":";
    bool f = true;
    for (const auto& [j, v] : row.coeffs) {
      if (v == 0.0) continue;
      out << (v < 0 ? " - " : (f ? " " : " + ")) << num(std::fabs(v)) << " " << varName(model, j);
      f = false;
    }
    if (f) out << " 0 " << varName(model, 0);
    switch (row.sense) {
      case RowSense::LessEqual: out << " <= "; break;
      case RowSense::Equal: out << " = "; break;
      case RowSense::GreaterEqual: out << " >= "; break;
    }
    out << num(row.rhs) << "\n";
  }
  out << "Bounds\n";
  for (int j = 0; j < model.numVars(); ++j) {
    const double l = model.lower[j], u = model.upper[j];
    if (!std::isfinite(l) && !std::isfinite(u)) {
      out << " " << varName(model, j) << " free\n";
    } else if (l == u) {
      out << " " << varName(model, j) << " = " << num(l) << "\n";
    } else {
      out << " ";
      if (std::isfinite(l)) out << num(l) << " <= ";
      else out << "-infinity <= ";
      out << varName(model, j);
      if (std::isfinite(u)) out << " <= " << num(u);
      out << "\n";
    }
  }
  bool anyBin = false;
  for (int j = 0; j < model.numVars(); ++j) anyBin = anyBin || model.binary[j];
  if (anyBin) {
    out << "Binaries\n";
    for (int j = 0; j < model.numVars(); ++j) {
      if (model.binary[j]) out << " " << varName(model, j);
    }
    out << "\n";
  }
  out << "End\n";
}

}  // namespace rdio::milp
