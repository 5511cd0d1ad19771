#include "rdio/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rdio/datagen.hpp"
#include "rdio/dataset_io.hpp"
#include "rdio/harness.hpp"
#include "rdio/inference.hpp"
#include "rdio/result_io.hpp"
#include "rdio/util.hpp"

namespace rdio::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitSolverLimit = 2;
constexpr int kExitCertificate = 3;

struct CommonOpts {
  std::string data, config, out;
  std::uint64_t seed = 1;
};

io::ExperimentConfig loadConfigOrDefault(const std::string& path) {
  if (path.empty()) return io::ExperimentConfig{};
  return io::readConfigJson(path);
}

Objective defaultObjective(std::size_t m) { return Objective::linear(Vec(m, 1.0)); }

struct InferOutcome {
  io::StoredResult stored;
  inference::RdioProblem problem;
};

InferOutcome runInference(const Dataset& dataset, const io::ExperimentConfig& cfg,
                          const inference::RdioSolveOptions& solveOpts) {
  const Objective objective =
      cfg.objective ? *cfg.objective : defaultObjective(dataset.dimension());
  const auto report = geometry::checkWellPosed(dataset, cfg.known, cfg.rdio.templates);
  if (!report.overall) {
    throw InputError("dataset is not well-posed for inference: " + report.describe());
  }
  const auto preferred = geometry::preferredSolution(dataset.acceptedPoints(), objective);
  const Region knownWithTangent =
      inference::appendTangentHalfspace(cfg.known, objective, preferred.x0);
  InferOutcome out{io::StoredResult{inference::InferenceResult{}, objective},
                   inference::buildRdio(dataset, knownWithTangent, preferred.x0, objective,
                                        cfg.rdio)};
  out.stored.result = inference::solveRdio(out.problem, solveOpts);
  return out;
}

int cmdGen(const CommonOpts& common, bool planted, int m, int nTrue, int nAcc, int nRej,
           const std::string& basePlans, int perBase, double perturb, const std::string& truthOut) {
  if (planted == !basePlans.empty()) {
    throw InputError("gen: choose exactly one of --planted or --base-plans");
  }
  Dataset dataset;
  if (planted) {
    auto inst = datagen::plantedInstance(m, nTrue, nAcc, nRej, common.seed);
    dataset = std::move(inst.dataset);
    if (!truthOut.empty()) {
      // persist the ground-truth rows for inspection
      std::ostringstream text;
      text << "{\n  \"rows\": [\n";
      for (std::size_t r = 0; r < inst.trueRegion.inferredLinear.size(); ++r) {
        const auto& lc = inst.trueRegion.inferredLinear[r];
        text << "    {\"a\": [";
        for (std::size_t j = 0; j < lc.a.size(); ++j) {
          char buf[64];
          std::snprintf(buf, sizeof(buf), "%.17g", lc.a[j]);
          text << (j ? "," : "") << buf;
        }
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", lc.b);
        text << "], \"b\": " << buf << "}";
        text << (r + 1 < inst.trueRegion.inferredLinear.size() ? ",\n" : "\n");
      }
      text << "  ]\n}\n";
      std::ofstream out(truthOut, std::ios::trunc);
      if (!out) throw InputError("gen: cannot write " + truthOut);
      out << text.str();
    }
  } else {
    const Dataset bases = io::readDatasetCsv(basePlans);
    std::vector<std::size_t> clipped;
    dataset = datagen::synthesizeCohort(bases.observations, perBase, perturb, common.seed,
                                        &clipped);
    dataset.featureNames = bases.featureNames;
    if (!clipped.empty()) {
      std::cerr << "gen: clipped " << clipped.size() << " negative dose value(s) to zero\n";
    }
  }
  if (common.out.empty()) throw InputError("gen: --out is required");
  io::writeDatasetCsv(dataset, common.out);
  std::cout << "wrote " << dataset.observations.size() << " observations ("
            << dataset.acceptedCount() << " accepted, " << dataset.rejectedCount()
            << " rejected) to " << common.out << "\n";
  return kExitOk;
}

int cmdInfer(const CommonOpts& common, int lconstraints, double epsilon, double bigM,
             const std::string& exportLp, double timeLimit, long nodeLimit) {
  if (common.data.empty() || common.out.empty()) {
    throw InputError("infer: --data and --out are required");
  }
  io::ExperimentConfig cfg = loadConfigOrDefault(common.config);
  if (lconstraints > 0) cfg.rdio.numLinear = lconstraints;
  if (epsilon > 0) cfg.rdio.epsilon = epsilon;
  if (bigM > 0) cfg.rdio.bigM = bigM;

  const Dataset dataset = io::readDatasetCsv(common.data);
  inference::RdioSolveOptions solveOpts;
  solveOpts.milp.timeLimitSec = timeLimit;
  solveOpts.milp.nodeLimit = nodeLimit;
  auto outcome = runInference(dataset, cfg, solveOpts);

  if (!exportLp.empty()) {
    std::ofstream lp(exportLp, std::ios::trunc);
    if (!lp) throw InputError("infer: cannot write " + exportLp);
    milp::writeLpFormat(outcome.problem.model, lp);
  }

  const auto status = outcome.stored.result.status;
  if (status == inference::InferenceStatus::Infeasible) {
    std::cerr << "infer: model infeasible; the dataset/epsilon combination admits no nominal "
                 "region (check well-posedness or lower --epsilon)\n";
    return kExitInput;
  }
  io::writeResultJson(outcome.stored, common.out);
  std::cout << "status " << (status == inference::InferenceStatus::Optimal ? "optimal" : "limit")
            << ", objective " << outcome.stored.result.objectiveValue << ", nodes "
            << outcome.stored.result.stats.nodes << ", wrote " << common.out << "\n";
  if (status != inference::InferenceStatus::Optimal) return kExitSolverLimit;
  return kExitOk;
}

int cmdEvaluate(const CommonOpts& common, const std::string& resultPath, bool withTangent) {
  if (resultPath.empty() || common.data.empty()) {
    throw InputError("evaluate: --result and --data are required");
  }
  const auto stored = io::readResultJson(resultPath);
  if (stored.result.status != inference::InferenceStatus::Optimal &&
      stored.result.status != inference::InferenceStatus::FeasibleIncumbent) {
    throw InputError("evaluate: stored result carries no usable region");
  }
  const Dataset dataset = io::readDatasetCsv(common.data);
  const Region region = stored.result.assembled(withTangent);
  const auto cm = harness::classify(region, dataset);
  const auto met = harness::metrics(cm);
  std::ostringstream text;
  text << "{\n  \"confusion\": {\"tp\": " << cm.tp << ", \"fp\": " << cm.fp
       << ", \"fn\": " << cm.fn << ", \"tn\": " << cm.tn << "},\n  \"metrics\": {";
  bool first = true;
  for (const auto& [key, value] : met) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    text << (first ? "" : ", ") << "\"" << key << "\": " << buf;
    first = false;
  }
  text << "}\n}\n";
  std::cout << text.str();
  if (!common.out.empty()) {
    std::ofstream out(common.out + ".tmp", std::ios::trunc);
    if (!out) throw InputError("evaluate: cannot write " + common.out);
    out << text.str();
    out.close();
    if (std::rename((common.out + ".tmp").c_str(), common.out.c_str()) != 0) {
      throw InputError("evaluate: cannot move output into place");
    }
  }
  return kExitOk;
}

int cmdSweep(const CommonOpts& common, const std::string& fractionsArg, int trials,
             bool paperScale, const std::string& csvOut) {
  if (common.data.empty() || common.out.empty()) {
    throw InputError("sweep: --data and --out are required");
  }
  const io::ExperimentConfig cfg = loadConfigOrDefault(common.config);
  const Dataset dataset = io::readDatasetCsv(common.data);

  std::vector<double> fractions;
  if (!fractionsArg.empty()) {
    std::istringstream in(fractionsArg);
    std::string cell;
    while (std::getline(in, cell, ',')) fractions.push_back(std::stod(cell));
  } else {
    for (double f = 0.2; f <= 0.801; f += 0.1) fractions.push_back(f);
  }
  int perCell = trials > 0 ? trials : (paperScale ? 250 : 20);

  harness::FoConfig fo;
  fo.known = cfg.known;
  fo.objective = cfg.objective ? *cfg.objective : defaultObjective(dataset.dimension());
  const auto result = harness::sweep(dataset, fractions, perCell, cfg.rdio, fo, common.seed);
  io::writeSweepJson(result, common.out);
  if (!csvOut.empty()) io::writeSweepCsv(result, csvOut);
  for (const auto& cell : result.cells) {
    std::cout << "fraction " << cell.fraction << ": ";
    if (cell.mean.count("accuracy")) {
      std::cout << "accuracy " << cell.mean.at("accuracy") << " +/- "
                << cell.stddev.at("accuracy");
    }
    std::cout << " (" << cell.failures << " failures)\n";
  }
  std::cout << "wrote " << common.out << "\n";
  return kExitOk;
}

int cmdVerify(const CommonOpts& common, const std::string& resultPath) {
  if (resultPath.empty() || common.data.empty()) {
    throw InputError("verify: --result and --data are required");
  }
  const auto stored = io::readResultJson(resultPath);
  const auto& result = stored.result;
  if (result.status != inference::InferenceStatus::Optimal) {
    throw InputError("verify: stored result is not optimal");
  }
  const Dataset dataset = io::readDatasetCsv(common.data);

  const auto certificate =
      inference::dioCertificate(result, result.known, result.x0, stored.objective);
  std::cout << "certificate: stationarity " << certificate.stationarityResidual
            << ", complementarity " << certificate.maxComplementarity << "\n";

  const Region full = result.assembled(true);
  if (!inference::verifyOptimality(full, stored.objective, result.x0, 1e-6)) {
    throw CertificateError("verify: x0 is not optimal over the assembled region");
  }
  std::cout << "optimality: x0 attains the region minimum within 1e-6\n";

  inference::RdioConfig cfg;
  cfg.numLinear = static_cast<int>(result.b.size());
  cfg.templates = result.templates;
  cfg.epsilon = result.epsilon;
  cfg.bigM = result.bigM;
  cfg.normalization = result.normalization;
  const auto problem =
      inference::buildRdio(dataset, result.known, result.x0, stored.objective, cfg);
  Region knownOnly = result.known;
  knownOnly.tangent.reset();
  inference::auditModelSize(problem, dataset, knownOnly, cfg);
  std::cout << "audit: model size matches the published count formulas\n";
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"constraint inference from accepted and rejected decisions"};
  app.require_subcommand(1);

  CommonOpts common;
  bool planted = false;
  int m = 2, nTrue = 4, nAcc = 20, nRej = 8;
  std::string basePlans, truthOut;
  int perBase = 20;
  double perturb = 0.2;
  auto* gen = app.add_subcommand("gen", "generate a dataset (planted polytope or cohort)");
  gen->add_flag("--planted", planted, "sample a planted ground-truth instance");
  gen->add_option("--m", m, "feature dimension");
  gen->add_option("--ntrue", nTrue, "planted constraint count");
  gen->add_option("--nacc", nAcc, "accepted points");
  gen->add_option("--nrej", nRej, "rejected points");
  gen->add_option("--base-plans", basePlans, "base plan CSV for cohort synthesis");
  gen->add_option("--per-base", perBase, "synthetic plans per base plan");
  gen->add_option("--perturb", perturb, "relative perturbation half-width");
  gen->add_option("--truth", truthOut, "write the planted rows to this JSON file");
  gen->add_option("--seed", common.seed, "random seed");
  gen->add_option("--out", common.out, "output CSV path")->required();

  int lconstraints = 0;
  double epsilon = -1.0, bigM = -1.0, timeLimit = -1.0;
  long nodeLimit = -1;
  std::string exportLp;
  auto* infer = app.add_subcommand("infer", "infer constraints from a labeled dataset");
  infer->add_option("--data", common.data, "dataset CSV")->required();
  infer->add_option("--config", common.config, "experiment config JSON");
  infer->add_option("--out", common.out, "result JSON path")->required();
  infer->add_option("--lconstraints", lconstraints, "number of inferred linear constraints");
  infer->add_option("--epsilon", epsilon, "strict-violation margin");
  infer->add_option("--big-m", bigM, "big-M constant");
  infer->add_option("--export-lp", exportLp, "also export the MILP in LP format");
  infer->add_option("--time-limit", timeLimit, "solver time limit in seconds");
  infer->add_option("--node-limit", nodeLimit, "solver node limit");
  infer->add_option("--seed", common.seed, "random seed");

  std::string resultPath;
  bool withTangent = false;
  auto* evaluate = app.add_subcommand("evaluate", "classify a dataset with a stored result");
  evaluate->add_option("--result", resultPath, "result JSON")->required();
  evaluate->add_option("--data", common.data, "dataset CSV")->required();
  evaluate->add_option("--out", common.out, "metrics JSON path");
  evaluate->add_flag("--with-tangent", withTangent, "include the tangent half-space");

  std::string fractionsArg, csvOut;
  int trials = 0;
  bool paperScale = false;
  auto* sweepCmd = app.add_subcommand("sweep", "train-fraction sensitivity sweep");
  sweepCmd->add_option("--data", common.data, "dataset CSV")->required();
  sweepCmd->add_option("--config", common.config, "experiment config JSON");
  sweepCmd->add_option("--out", common.out, "sweep JSON path")->required();
  sweepCmd->add_option("--csv", csvOut, "also write the fraction x metric grid as CSV");
  sweepCmd->add_option("--fractions", fractionsArg, "comma-separated train fractions");
  sweepCmd->add_option("--train-frac", fractionsArg, "single train fraction (alias)");
  sweepCmd->add_option("--trials", trials, "trials per fraction");
  sweepCmd->add_flag("--paper-scale", paperScale, "250 trials per fraction");
  sweepCmd->add_option("--seed", common.seed, "master seed");

  auto* verify = app.add_subcommand("verify", "re-verify a stored result");
  verify->add_option("--result", resultPath, "result JSON")->required();
  verify->add_option("--data", common.data, "training dataset CSV")->required();

  std::vector<std::string> argv = args;
  std::reverse(argv.begin(), argv.end());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& err) {
    if (err.get_exit_code() == 0) {  // --help
      std::cout << app.help();
      return kExitOk;
    }
    std::cerr << "argument error: " << err.what() << "\n";
    return kExitInput;
  }

  try {
    if (gen->parsed()) {
      return cmdGen(common, planted, m, nTrue, nAcc, nRej, basePlans, perBase, perturb, truthOut);
    }
    if (infer->parsed()) {
      return cmdInfer(common, lconstraints, epsilon, bigM, exportLp, timeLimit, nodeLimit);
    }
    if (evaluate->parsed()) return cmdEvaluate(common, resultPath, withTangent);
    if (sweepCmd->parsed()) return cmdSweep(common, fractionsArg, trials, paperScale, csvOut);
    if (verify->parsed()) return cmdVerify(common, resultPath);
  } catch (const CertificateError& err) {
    std::cerr << "certificate failure: " << err.what() << "\n";
    return kExitCertificate;
  } catch (const AuditError& err) {
    std::cerr << "audit failure: " << err.what() << "\n";
    return kExitCertificate;
  } catch (const InputError& err) {
    std::cerr << "input error: " << err.what() << "\n";
    return kExitInput;
  } catch (const UnsupportedError& err) {
    std::cerr << "unsupported: " << err.what() << "\n";
    return kExitInput;
  } catch (const NumericalError& err) {
    std::cerr << "numerical failure: " << err.what() << "\n";
    return kExitSolverLimit;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace rdio::cli
