#pragma once

#include <optional>
#include <vector>

#include "rdio/geometry.hpp"
#include "rdio/milp.hpp"
#include "rdio/model.hpp"

namespace rdio::inference {

enum class Normalization { L1Proxy, CoefficientBox };

/**
 * Configuration of the inverse instance: how many linear constraints to
 * infer, which nonlinear templates, the strict-violation margin epsilon and
 * big-M constant (non-positive values request the data-driven defaults), and
 * the normalization placed on inferred linear rows.
 */
struct RdioConfig {
  int numLinear = 1;
  std::vector<NonlinearTemplate> templates;
  double epsilon = -1.0;  // <= 0: 1e-3 x largest feature range
  double bigM = -1.0;     // <= 0: derived from the data box
  Normalization normalization = Normalization::L1Proxy;

  int numTemplates() const { return static_cast<int>(templates.size()); }
};

/// Data-driven constants resolved from the observation box.
struct ResolvedParams {
  double epsilon = 0.0;
  double bigM = 0.0;
  double capA = 1.0;  // coefficient box on inferred rows
  double capB = 0.0;  // bound on inferred offsets
  Vec boxLo, boxHi;   // observation box inflated 10%
};

ResolvedParams resolveParams(const Dataset& dataset, const RdioConfig& config);

/// Row origin tags used by the model-size audit.
enum RowTag : int {
  TagPrimalFeasLinear = 1,
  TagPrimalFeasTemplate,
  TagBigMKnownLinear,
  TagBigMTangent,
  TagBigMKnownTemplate,
  TagBigMInferredTemplate,
  TagBigMInferredLinear,
  TagCover,
  TagNormMembership,
  TagNormExtra,
  TagSeparation,
  TagSymmetryBreak,
};

/// Kinds of constraints in the combined index set I, in emission order.
enum class ConsKind { KnownLinear, Tangent, KnownTemplate, InferredTemplate, InferredLinear };

struct ConsRef {
  ConsKind kind;
  int index;  // position within its kind
};

/**
 * Index maps and provenance for a built RDIO program. All variable index
 * vectors address columns of the companion LpModel; -1 marks variables that
 * do not exist for a given (constraint, point) pair.
 */
struct RdioLayout {
  int m = 0;
  int numLinear = 0;
  std::vector<int> paramDims;
  int kPlus = 0, kMinus = 0;
  std::vector<ConsRef> constraints;  // the index set I
  ResolvedParams params;
  Normalization normalization = Normalization::L1Proxy;

  std::vector<int> aIdx;                 // numLinear * m, row-major
  std::vector<int> bIdx;                 // numLinear
  std::vector<std::vector<int>> qIdx;    // per template
  std::vector<std::vector<int>> yIdx;    // |I| x kMinus
  std::vector<std::vector<int>> dIdx;    // |I| x kMinus (-1 for known rows)
  std::vector<int> zIdx;                 // kMinus
  std::vector<std::vector<int>> pIdx;    // |I| x kMinus
  std::vector<int> deltaPlus, deltaMinus;  // numLinear

  // data carried for warm starts, verification and assembly
  std::vector<Point> accepted, rejected;
  Point x0;
  Region known;  // tangent included
  std::vector<NonlinearTemplate> templates;

  int a(int ell, int j) const { return aIdx[static_cast<std::size_t>(ell) * m + j]; }
};

struct RdioProblem {
  milp::LpModel model;
  RdioLayout layout;
};

/// Region with the tangent half-space of the objective at x0 attached.
Region appendTangentHalfspace(const Region& region, const Objective& objective, const Point& x0);

/**
 * Assemble the reduced inverse MILP: primal feasibility rows for accepted
 * points, big-M infeasibility rows over every constraint for rejected
 * points, the per-point cover row, normalization, the separation-distance
 * linearization, and symmetry-breaking order on inferred offsets.
 * `known` must already carry the tangent half-space.
 */
RdioProblem buildRdio(const Dataset& dataset, const Region& known, const Point& x0,
                      const Objective& objective, const RdioConfig& config);

enum class InferenceStatus { Optimal, FeasibleIncumbent, Infeasible, LimitReached };

struct SolveStats {
  long nodes = 0;
  long lpSolves = 0;
  double wallSec = 0.0;
  bool warmStarted = false;
};

struct InferenceResult {
  InferenceStatus status = InferenceStatus::Infeasible;
  Mat A;                   // numLinear x m inferred coefficients
  Vec b;                   // numLinear inferred offsets
  std::vector<Vec> q;      // per-template parameters
  std::vector<std::vector<int>> yPattern;  // |I| x kMinus
  Mat dInferred;           // |I| x kMinus distances (0 where undefined)
  Vec z;                   // kMinus separation distances
  double objectiveValue = 0.0;
  SolveStats stats;

  // echo of the instance, making the result self-contained
  std::vector<NonlinearTemplate> templates;
  Region known;  // tangent included
  Point x0;
  double epsilon = 0.0, bigM = 0.0;
  Normalization normalization = Normalization::L1Proxy;

  /// Known constraints plus inferred rows; tangent attached on request.
  Region assembled(bool includeTangent) const;
};

struct RdioSolveOptions {
  milp::SolverOptions milp;
  bool useWarmStart = true;
};

/**
 * Solve the built program. Optimal results are guaranteed nominal on the
 * training data (verified before returning). Infeasibility signals violated
 * well-posedness or an epsilon too large for the data and is reported via
 * the status with diagnostics in the exception-free path.
 */
InferenceResult solveRdio(const RdioProblem& problem, const RdioSolveOptions& options = {});

/// Separating-hyperplane candidate rows (one per rejected point, remainder
/// filled with the objective-gradient row).
struct WarmStart {
  Mat A;
  Vec b;
  std::vector<Vec> q;
};

/**
 * Constructive feasibility: per rejected point, a max-margin separating
 * hyperplane against the accepted points; remaining rows replicate the
 * tangent row of the objective at x0. Requires numLinear >= |K-| + 1.
 * Throws InputError naming the offending rejected point when it cannot be
 * separated from the accepted hull (violated well-posedness (c)).
 */
WarmStart warmStartSeparation(const Dataset& dataset, const Point& x0,
                              const Objective& objective, const RdioConfig& config);

/// Expand a warm start into a full variable assignment for the built model.
Vec completeAssignment(const RdioProblem& problem, const WarmStart& ws);

struct KktCertificate {
  Vec lambda;    // template multipliers, zero by construction
  Vec mu;        // linear-row multipliers, zero by construction
  double lambda0 = -1.0;  // tangent-row multiplier
  double stationarityResidual = 0.0;
  double maxComplementarity = 0.0;
};

/**
 * Stationarity certificate for x0 on the assembled region: lambda = mu = 0,
 * lambda0 = -1 cancels the objective gradient against the tangent row.
 * Verifies stationarity and complementarity residuals (<= 1e-8) and primal
 * feasibility of x0; throws CertificateError naming the violated condition.
 */
KktCertificate dioCertificate(const InferenceResult& result, const Region& knownWithTangent,
                              const Point& x0, const Objective& objective);

/**
 * True when the objective minimum over the region (tangent included) is at
 * least f(x0) - tol. Throws NumericalError with the descent ray when the
 * region is unbounded in the descent direction.
 */
bool verifyOptimality(const Region& region, const Objective& objective, const Point& x0,
                      double tol);

/// Upper bound on the number of inferred constraints needed: |K-| + 1.
int minConstraintUpperBound(const Dataset& dataset);

/**
 * Check the built program against the published size formulas: continuous
 * (m+1)|L~| + phi |N~|; binaries (|N|+|L|+|N~|+|L~|)|K-|; base linear rows
 * |L~|(|K+|+1) + (|L|+1)|K-|; template-origin rows |N~|(|K+|+|K-|) + |N||K-|.
 * The tangent row and the separation/normalization expansions are counted
 * separately. Throws AuditError listing expected vs. actual on mismatch.
 */
bool auditModelSize(const RdioProblem& problem, const Dataset& dataset, const Region& known,
                    const RdioConfig& config);

}  // namespace rdio::inference
