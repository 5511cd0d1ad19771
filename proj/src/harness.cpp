#include "rdio/harness.hpp"

#include <algorithm>
#include <cmath>

#include "rdio/geometry.hpp"
#include "rdio/util.hpp"

namespace rdio::harness {

namespace {

std::vector<std::size_t> shuffled(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniformInt(0, static_cast<int>(i) - 1));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}  // namespace

std::pair<Dataset, Dataset> split(const Dataset& dataset, double fracPast, std::uint64_t seed) {
  if (fracPast <= 0.0 || fracPast >= 1.0) throw InputError("split: fracPast must be in (0,1)");
  dataset.validate();
  const long n = static_cast<long>(dataset.observations.size());
  if (n < 2) throw InputError("split: need at least two observations");

  std::vector<std::size_t> accIdx, rejIdx;
  for (std::size_t i = 0; i < dataset.observations.size(); ++i) {
    (dataset.observations[i].label == Label::Accepted ? accIdx : rejIdx).push_back(i);
  }
  const long target = std::lround(fracPast * static_cast<double>(n));
  long pastAcc = std::lround(fracPast * static_cast<double>(accIdx.size()));
  long pastRej = target - pastAcc;
  pastRej = std::clamp<long>(pastRej, 0, static_cast<long>(rejIdx.size()));
  pastAcc = std::clamp<long>(target - pastRej, 0, static_cast<long>(accIdx.size()));

  // both sides keep an accepted point whenever the counts allow it
  if (accIdx.size() >= 2) {
    pastAcc = std::clamp<long>(pastAcc, 1, static_cast<long>(accIdx.size()) - 1);
  } else if (accIdx.size() == 1 && pastAcc == 0) {
    pastAcc = 1;
  }
  if (pastAcc == 0) throw InputError("split: training side would have no accepted points");

  Rng rng(seed);
  const auto accShuffle = shuffled(accIdx.size(), rng);
  const auto rejShuffle = shuffled(rejIdx.size(), rng);

  std::vector<bool> toPast(dataset.observations.size(), false);
  for (long i = 0; i < pastAcc; ++i) toPast[accIdx[accShuffle[static_cast<std::size_t>(i)]]] = true;
  for (long i = 0; i < pastRej; ++i) toPast[rejIdx[rejShuffle[static_cast<std::size_t>(i)]]] = true;

  Dataset past, future;
  past.featureNames = dataset.featureNames;
  future.featureNames = dataset.featureNames;
  for (std::size_t i = 0; i < dataset.observations.size(); ++i) {
    (toPast[i] ? past : future).observations.push_back(dataset.observations[i]);
  }
  if (future.observations.empty()) throw InputError("split: future side is empty");
  return {std::move(past), std::move(future)};
}

ConfusionMatrix classify(const Region& region, const Dataset& dataset, double tol) {
  ConfusionMatrix cm;
  for (const auto& obs : dataset.observations) {
    const bool feasible = regionContains(region, obs.point, tol);
    const bool accepted = obs.label == Label::Accepted;
    if (feasible && accepted) ++cm.tp;
    else if (feasible && !accepted) ++cm.fp;
    else if (!feasible && accepted) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

MetricMap metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw InputError("metrics: empty confusion matrix");
  MetricMap out;
  out["accuracy"] = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
  const long predPos = cm.tp + cm.fp;
  const long actPos = cm.tp + cm.fn;
  const long actNeg = cm.tn + cm.fp;
  if (predPos > 0) out["precision"] = static_cast<double>(cm.tp) / static_cast<double>(predPos);
  if (actPos > 0) out["recall"] = static_cast<double>(cm.tp) / static_cast<double>(actPos);
  if (actNeg > 0) out["specificity"] = static_cast<double>(cm.tn) / static_cast<double>(actNeg);
  if (out.count("precision") && out.count("recall")) {
    const double p = out["precision"], r = out["recall"];
    if (p + r > 0.0) out["f1"] = 2.0 * p * r / (p + r);
  }
  return out;
}

TrialResult runTrial(const Dataset& dataset, double fracPast, std::uint64_t seed,
                     const inference::RdioConfig& rdioConfig, const FoConfig& fo,
                     const inference::RdioSolveOptions& solve) {
  TrialResult out;
  out.seed = seed;
  out.trainFraction = fracPast;

  auto [past, future] = split(dataset, fracPast, seed);
  const auto report = geometry::checkWellPosed(past, fo.known, rdioConfig.templates);
  if (!report.overall) {
    throw InputError("runTrial: training split is not well-posed: " + report.describe());
  }

  const auto preferred = geometry::preferredSolution(past.acceptedPoints(), fo.objective);
  const Region knownWithTangent =
      inference::appendTangentHalfspace(fo.known, fo.objective, preferred.x0);
  const auto problem = inference::buildRdio(past, knownWithTangent, preferred.x0, fo.objective,
                                            rdioConfig);
  const auto result = inference::solveRdio(problem, solve);
  out.status = result.status;
  out.stats = result.stats;
  if (result.status != inference::InferenceStatus::Optimal) {
    out.complete = false;
    out.note = "solver did not reach optimality";
    return out;
  }
  out.complete = true;

  // classification region: known plus inferred rows; the tangent half-space
  // is the optimality device, not part of the nominal-set prediction
  const Region region = result.assembled(false);
  out.confusion = classify(region, future);
  out.testMetrics = metrics(out.confusion);
  const long feasible = out.confusion.tp + out.confusion.fp;
  const long accepted = out.confusion.tp + out.confusion.fn;
  if (feasible > 0) {
    out.feasibleAcceptedShare = static_cast<double>(out.confusion.tp) / static_cast<double>(feasible);
  }
  if (accepted > 0) {
    out.acceptedFeasibleShare = static_cast<double>(out.confusion.tp) / static_cast<double>(accepted);
  }
  return out;
}

SweepResult sweep(const Dataset& dataset, const std::vector<double>& fractions,
                  int trialsPerFraction, const inference::RdioConfig& rdioConfig,
                  const FoConfig& fo, std::uint64_t seed,
                  const inference::RdioSolveOptions& solve) {
  if (trialsPerFraction < 1) throw InputError("sweep: trialsPerFraction must be positive");
  SweepResult out;
  Rng master(seed);
  for (std::size_t f = 0; f < fractions.size(); ++f) {
    SweepCell cell;
    cell.fraction = fractions[f];
    Rng cellRng = master.fork(f + 1);
    for (int t = 0; t < trialsPerFraction; ++t) {
      const std::uint64_t trialSeed = cellRng.next();
      try {
        cell.trials.push_back(runTrial(dataset, fractions[f], trialSeed, rdioConfig, fo, solve));
        if (!cell.trials.back().complete) ++cell.failures;
      } catch (const std::exception& err) {
        ++cell.failures;
        TrialResult failed;
        failed.seed = trialSeed;
        failed.trainFraction = fractions[f];
        failed.note = err.what();
        cell.trials.push_back(std::move(failed));
      }
    }
    // aggregate over trials where each metric is present
    std::map<std::string, std::vector<double>> samples;
    for (const auto& trial : cell.trials) {
      for (const auto& [key, value] : trial.testMetrics) samples[key].push_back(value);
    }
    for (const auto& [key, values] : samples) {
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      double var = 0.0;
      for (double v : values) var += (v - mean) * (v - mean);
      var = values.size() > 1 ? var / static_cast<double>(values.size() - 1) : 0.0;
      cell.mean[key] = mean;
      cell.stddev[key] = std::sqrt(var);
    }
    out.cells.push_back(std::move(cell));
  }
  return out;
}

}  // namespace rdio::harness
