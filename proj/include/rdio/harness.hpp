#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rdio/inference.hpp"
#include "rdio/model.hpp"

namespace rdio::harness {

/// Predicted-accepted = region-feasible; actual = historical label.
struct ConfusionMatrix {
  long tp = 0, fp = 0, fn = 0, tn = 0;
  long total() const { return tp + fp + fn + tn; }
};

/// Metric map; ratios with zero denominators are absent rather than zeroed.
using MetricMap = std::map<std::string, double>;

/**
 * Stratified split: past/future shares of round(frac * n) and the remainder,
 * with accepted and rejected points allocated proportionally so both sides
 * keep at least one accepted point whenever possible. Deterministic per seed.
 */
std::pair<Dataset, Dataset> split(const Dataset& dataset, double fracPast, std::uint64_t seed);

/// Tally region-feasibility predictions against labels.
ConfusionMatrix classify(const Region& region, const Dataset& dataset, double tol = 1e-6);

/// accuracy, precision, recall, specificity, f1 from a confusion matrix.
MetricMap metrics(const ConfusionMatrix& cm);

struct TrialResult {
  std::uint64_t seed = 0;
  double trainFraction = 0.0;
  bool complete = false;  // solver reached a usable (optimal) result
  inference::InferenceStatus status = inference::InferenceStatus::Infeasible;
  ConfusionMatrix confusion;
  MetricMap testMetrics;
  // share of region-feasible future points that were historically accepted,
  // and share of historically accepted future points that are region-feasible
  double feasibleAcceptedShare = 0.0;
  double acceptedFeasibleShare = 0.0;
  inference::SolveStats stats;
  std::string note;
};

struct FoConfig {
  Region known;  // without the tangent; appended per trial at the split's x0
  Objective objective;
};

/**
 * One end-to-end trial: split, well-posedness check, preferred solution on
 * the training accepted points, tangent append, build, solve, classify the
 * held-out future points against the inferred nominal region.
 */
TrialResult runTrial(const Dataset& dataset, double fracPast, std::uint64_t seed,
                     const inference::RdioConfig& rdioConfig, const FoConfig& fo,
                     const inference::RdioSolveOptions& solve = {});

struct SweepCell {
  double fraction = 0.0;
  std::vector<TrialResult> trials;
  MetricMap mean, stddev;
  int failures = 0;
};

struct SweepResult {
  std::vector<SweepCell> cells;
};

/**
 * Train-fraction sensitivity sweep: `trialsPerFraction` independent trials
 * per fraction with seeds derived from the master seed; per-cell mean and
 * standard deviation per metric. Trial errors are recorded per cell and the
 * sweep continues.
 */
SweepResult sweep(const Dataset& dataset, const std::vector<double>& fractions,
                  int trialsPerFraction, const inference::RdioConfig& rdioConfig,
                  const FoConfig& fo, std::uint64_t seed,
                  const inference::RdioSolveOptions& solve = {});

}  // namespace rdio::harness
