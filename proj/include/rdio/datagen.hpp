#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rdio/model.hpp"

namespace rdio::datagen {

/// One clinical dose criterion: a floor (min) or cap (max) in Gy on a feature.
struct GuidelineCriterion {
  std::string name;
  int featureIndex = 0;
  enum class Sense { Min, Max } sense = Sense::Min;
  double limitGy = 0.0;
};

/// The eight dose-metric criteria with their clinical limits in Gy.
std::vector<GuidelineCriterion> guidelineTable();

/**
 * Evaluate a plan against the guideline criteria. `mapping` assigns each
 * criterion name a feature index and must cover all eight criteria.
 * Returns per-criterion booleans plus the conjunction.
 */
std::pair<std::vector<bool>, bool> checkGuidelines(const Point& plan,
                                                   const std::map<std::string, int>& mapping);

/**
 * Synthetic cohort: each base plan plus `perBase` copies with every
 * coordinate independently perturbed by a uniform factor in
 * [1-perturb, 1+perturb]; labels inherited from the base. Negative doses are
 * clipped to zero and reported via `clippedOut` when provided.
 */
Dataset synthesizeCohort(const std::vector<Observation>& basePlans, int perBase, double perturb,
                         std::uint64_t seed, std::vector<std::size_t>* clippedOut = nullptr);

/// Forward configuration of the radiotherapy instance.
struct RtForwardConfig {
  Region known;       // dose floor on the first feature, nonnegativity elsewhere
  Objective objective;  // minimize the two organ-at-risk max doses
  int numInferred = 10;
  std::vector<std::string> featureNames;
};

RtForwardConfig rtForwardConfig();

/// A synthetic instance with a known ground-truth region.
struct PlantedInstance {
  Region trueRegion;  // sampled polytope stored in the inferred slots
  Dataset dataset;
  std::uint64_t seed = 0;
};

/**
 * Sample a bounded polytope (rows representable under the l1-proxy
 * normalization), accepted points inside it and rejected points outside it
 * with a clear margin, re-sampled until the dataset is well-posed.
 * Desk-scale caps: m <= 8, nTrue <= 12.
 */
PlantedInstance plantedInstance(int m, int nTrue, int nAcc, int nRej, std::uint64_t seed);

}  // namespace rdio::datagen
