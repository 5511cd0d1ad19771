#pragma once

#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rdio/linalg.hpp"

namespace rdio::milp {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class RowSense { LessEqual, Equal, GreaterEqual };
enum class ObjSense { Minimize, Maximize };

/// One linear row: sum of coeffs over variables, compared against rhs.
struct Row {
  std::vector<std::pair<int, double>> coeffs;  // (variable index, coefficient)
  RowSense sense = RowSense::LessEqual;
  double rhs = 0.0;
  int tag = 0;  // caller-defined origin tag, carried through audits
};

/**
 * A bounded-variable linear program, optionally with binary variables.
 *
 * Every variable carries explicit bounds; binary variables must be declared
 * with bounds inside [0, 1]. The same structure feeds solveLp (integrality
 * ignored), solveMilp and bruteForceMilp.
 */
struct LpModel {
  ObjSense sense = ObjSense::Minimize;
  std::vector<double> lower, upper, objective;
  std::vector<bool> binary;
  std::vector<std::string> names;
  std::vector<Row> rows;

  int numVars() const { return static_cast<int>(lower.size()); }

  int addVar(double lo, double hi, double obj, bool isBinary = false, std::string name = {});
  void addRow(std::vector<std::pair<int, double>> coeffs, RowSense s, double rhs, int tag = 0);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vec x;                  // primal values (empty unless optimal)
  Vec rowDuals;           // one multiplier per row, in the model's sense
  Vec reducedCosts;       // one per variable
  double objective = 0.0;
  Vec ray;                // improving ray when status == Unbounded
  int iterations = 0;
};

enum class BranchRule { MostFractional, FirstFractional };

struct SolverOptions {
  double intTol = 1e-6;
  double gapTol = 0.0;
  long nodeLimit = -1;        // < 0: unlimited
  double timeLimitSec = -1.0; // < 0: unlimited
  BranchRule branchRule = BranchRule::MostFractional;
  std::optional<Vec> warmStart;  // full-length candidate used as the initial incumbent
};

enum class MilpStatus { Optimal, Infeasible, Unbounded, LimitReached };

struct MilpSolution {
  MilpStatus status = MilpStatus::Infeasible;
  Vec x;
  double objective = 0.0;
  double bestBound = 0.0;
  long nodes = 0;
  long lpSolves = 0;
  double wallSec = 0.0;
};

/// Primal bounded-variable simplex (two-phase, Bland anti-cycling fallback).
LpSolution solveLp(const LpModel& model);

/// Branch-and-bound over the binary variables; exact when gapTol == 0.
MilpSolution solveMilp(const LpModel& model, const SolverOptions& options = {});

/// Exhaustive enumeration over binary assignments; verification oracle.
/// Refuses models with more than 20 binaries.
MilpSolution bruteForceMilp(const LpModel& model);

/// Largest violation of rows and bounds at x (0 when fully feasible).
double maxViolation(const LpModel& model, const Vec& x);

/// Activity of a row at x.
double rowActivity(const Row& row, const Vec& x);

/// Duality gap |primal - dual| / (1 + |primal|) for an optimal solution.
double dualityGap(const LpModel& model, const LpSolution& sol);

/// Write the model in LP interchange format with 17 significant digits.
void writeLpFormat(const LpModel& model, std::ostream& out);

}  // namespace rdio::milp
