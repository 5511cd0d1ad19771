#pragma once

#include <optional>
#include <string>

#include "rdio/harness.hpp"
#include "rdio/inference.hpp"
#include "rdio/model.hpp"

namespace rdio::io {

/// Inference result together with the objective it was produced under.
struct StoredResult {
  inference::InferenceResult result;
  Objective objective;
};

/// Structured result document: matrices row-major, status string, objective
/// value, solve stats, and the instance echo (known region, tangent, x0,
/// epsilon, big-M, normalization, templates, objective).
void writeResultJson(const StoredResult& stored, const std::string& path);
StoredResult readResultJson(const std::string& path);

std::string resultToJsonText(const StoredResult& stored);
StoredResult resultFromJsonText(const std::string& text);

/// Experiment configuration file: inverse-instance parameters plus the
/// forward model (known constraints and objective).
struct ExperimentConfig {
  inference::RdioConfig rdio;
  Region known;
  std::optional<Objective> objective;
};

ExperimentConfig readConfigJson(const std::string& path);
ExperimentConfig configFromJsonText(const std::string& text);

/// Trial/sweep reporting: config echo, per-trial metrics, aggregates.
void writeSweepJson(const harness::SweepResult& result, const std::string& path);

/// 'fraction x metric' grid of means and standard deviations.
std::string sweepToCsv(const harness::SweepResult& result);
void writeSweepCsv(const harness::SweepResult& result, const std::string& path);

/// Guideline mapping file: JSON object of criterion name to feature index.
std::map<std::string, int> readGuidelineMapping(const std::string& path);

}  // namespace rdio::io
