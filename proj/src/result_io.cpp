#include "rdio/result_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rdio/util.hpp"

namespace rdio::io {

using nlohmann::json;

namespace {

void writeTextFile(const std::string& text, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write file: " + tmp);
    out << text;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw InputError("cannot move file into place: " + path);
  }
}

std::string readTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json toJson(const Vec& v) { return json(v); }

Vec vecFromJson(const json& j) {
  if (!j.is_array()) throw InputError("json: expected an array of numbers");
  Vec out;
  for (const auto& x : j) out.push_back(x.get<double>());
  return out;
}

json toJson(const Mat& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols; ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matFromJson(const json& j) {
  if (!j.is_array()) throw InputError("json: expected a matrix (array of arrays)");
  if (j.empty()) return Mat{};
  Mat m(j.size(), j[0].size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != m.cols) throw InputError("json: ragged matrix");
    for (std::size_t c = 0; c < m.cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

json toJson(const BasisFunction& bf) {
  json out;
  switch (bf.type) {
    case BasisFunction::Type::Constant: out["type"] = "const"; break;
    case BasisFunction::Type::Coordinate:
      out["type"] = "coord";
      out["index"] = bf.index;
      break;
    case BasisFunction::Type::NegSquare:
      out["type"] = "neg_square";
      out["index"] = bf.index;
      out["center"] = bf.center;
      break;
  }
  return out;
}

BasisFunction basisFromJson(const json& j) {
  BasisFunction bf;
  const std::string type = j.at("type").get<std::string>();
  if (type == "const") {
    bf.type = BasisFunction::Type::Constant;
  } else if (type == "coord") {
    bf.type = BasisFunction::Type::Coordinate;
    bf.index = j.at("index").get<int>();
  } else if (type == "neg_square") {
    bf.type = BasisFunction::Type::NegSquare;
    bf.index = j.at("index").get<int>();
    bf.center = j.value("center", 0.0);
  } else {
    throw InputError("json: unknown basis function type '" + type + "'");
  }
  return bf;
}

json toJson(const NonlinearTemplate& tmpl) {
  json bases = json::array();
  for (const auto& bf : tmpl.basis) bases.push_back(toJson(bf));
  json out;
  out["bases"] = std::move(bases);
  if (!tmpl.lowerBounds.empty()) out["lower"] = toJson(tmpl.lowerBounds);
  if (!tmpl.upperBounds.empty()) out["upper"] = toJson(tmpl.upperBounds);
  return out;
}

NonlinearTemplate templateFromJson(const json& j) {
  NonlinearTemplate tmpl;
  for (const auto& b : j.at("bases")) tmpl.basis.push_back(basisFromJson(b));
  if (j.contains("lower")) tmpl.lowerBounds = vecFromJson(j["lower"]);
  if (j.contains("upper")) tmpl.upperBounds = vecFromJson(j["upper"]);
  if (!tmpl.lowerBounds.empty() &&
      tmpl.lowerBounds.size() != static_cast<std::size_t>(tmpl.paramDim())) {
    throw InputError("json: template bound length mismatch");
  }
  return tmpl;
}

json toJson(const Region& region) {
  json out;
  json lin = json::array();
  for (const auto& lc : region.knownLinear) {
    lin.push_back(json{{"a", toJson(lc.a)}, {"b", lc.b}});
  }
  out["linear"] = std::move(lin);
  json nl = json::array();
  for (const auto& [tmpl, q] : region.knownNonlinear) {
    nl.push_back(json{{"template", toJson(tmpl)}, {"q", toJson(q)}});
  }
  out["nonlinear"] = std::move(nl);
  if (region.tangent) {
    out["tangent"] = json{{"normal", toJson(region.tangent->normal)},
                          {"offset", region.tangent->offset}};
  }
  return out;
}

Region regionFromJson(const json& j) {
  Region region;
  for (const auto& lc : j.value("linear", json::array())) {
    region.knownLinear.push_back({vecFromJson(lc.at("a")), lc.at("b").get<double>()});
  }
  for (const auto& nl : j.value("nonlinear", json::array())) {
    region.knownNonlinear.push_back(
        {templateFromJson(nl.at("template")), vecFromJson(nl.at("q"))});
  }
  if (j.contains("tangent")) {
    region.tangent = Halfspace{vecFromJson(j["tangent"].at("normal")),
                               j["tangent"].at("offset").get<double>()};
  }
  return region;
}

json toJson(const Objective& obj) {
  json out;
  out["kind"] = obj.kind == Objective::Kind::Linear ? "linear" : "quadratic";
  out["c"] = toJson(obj.c);
  if (obj.kind == Objective::Kind::ConvexQuadratic) out["Q"] = toJson(obj.Q);
  return out;
}

Objective objectiveFromJson(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "linear") return Objective::linear(vecFromJson(j.at("c")));
  if (kind == "quadratic") {
    return Objective::quadratic(vecFromJson(j.at("c")), matFromJson(j.at("Q")));
  }
  throw InputError("json: unknown objective kind '" + kind + "'");
}

const char* statusName(inference::InferenceStatus s) {
  switch (s) {
    case inference::InferenceStatus::Optimal: return "optimal";
    case inference::InferenceStatus::FeasibleIncumbent: return "feasibleIncumbent";
    case inference::InferenceStatus::Infeasible: return "infeasible";
    case inference::InferenceStatus::LimitReached: return "limitReached";
  }
  return "unknown";
}

inference::InferenceStatus statusFromName(const std::string& s) {
  if (s == "optimal") return inference::InferenceStatus::Optimal;
  if (s == "feasibleIncumbent") return inference::InferenceStatus::FeasibleIncumbent;
  if (s == "infeasible") return inference::InferenceStatus::Infeasible;
  if (s == "limitReached") return inference::InferenceStatus::LimitReached;
  throw InputError("json: unknown result status '" + s + "'");
}

}  // namespace

std::string resultToJsonText(const StoredResult& stored) {
  const auto& r = stored.result;
  json out;
  out["status"] = statusName(r.status);
  out["objective_value"] = r.objectiveValue;
  out["epsilon"] = r.epsilon;
  out["big_m"] = r.bigM;
  out["normalization"] =
      r.normalization == inference::Normalization::L1Proxy ? "l1proxy" : "coefficient_box";
  out["x0"] = toJson(r.x0);
  out["A"] = toJson(r.A);
  out["b"] = toJson(r.b);
  json q = json::array();
  for (const auto& qi : r.q) q.push_back(toJson(qi));
  out["q"] = std::move(q);
  json tmpls = json::array();
  for (const auto& tmpl : r.templates) tmpls.push_back(toJson(tmpl));
  out["templates"] = std::move(tmpls);
  out["known"] = toJson(r.known);
  out["objective"] = toJson(stored.objective);
  out["y_pattern"] = json(r.yPattern);
  out["z"] = toJson(r.z);
  out["stats"] = json{{"nodes", r.stats.nodes},
                      {"lp_solves", r.stats.lpSolves},
                      {"wall_sec", r.stats.wallSec},
                      {"warm_started", r.stats.warmStarted}};
  return out.dump(2) + "\n";
}

StoredResult resultFromJsonText(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& err) {
    throw InputError(std::string("result json: ") + err.what());
  }
  StoredResult stored;
  auto& r = stored.result;
  r.status = statusFromName(j.at("status").get<std::string>());
  r.objectiveValue = j.value("objective_value", 0.0);
  r.epsilon = j.at("epsilon").get<double>();
  r.bigM = j.at("big_m").get<double>();
  r.normalization = j.value("normalization", "l1proxy") == std::string("l1proxy")
                        ? inference::Normalization::L1Proxy
                        : inference::Normalization::CoefficientBox;
  r.x0 = vecFromJson(j.at("x0"));
  r.A = matFromJson(j.at("A"));
  r.b = vecFromJson(j.at("b"));
  for (const auto& qi : j.value("q", json::array())) r.q.push_back(vecFromJson(qi));
  for (const auto& t : j.value("templates", json::array())) r.templates.push_back(templateFromJson(t));
  r.known = regionFromJson(j.at("known"));
  stored.objective = objectiveFromJson(j.at("objective"));
  if (j.contains("y_pattern")) {
    r.yPattern = j["y_pattern"].get<std::vector<std::vector<int>>>();
  }
  if (j.contains("z")) r.z = vecFromJson(j["z"]);
  if (j.contains("stats")) {
    r.stats.nodes = j["stats"].value("nodes", 0L);
    r.stats.lpSolves = j["stats"].value("lp_solves", 0L);
    r.stats.wallSec = j["stats"].value("wall_sec", 0.0);
    r.stats.warmStarted = j["stats"].value("warm_started", false);
  }
  return stored;
}

void writeResultJson(const StoredResult& stored, const std::string& path) {
  writeTextFile(resultToJsonText(stored), path);
}

StoredResult readResultJson(const std::string& path) {
  return resultFromJsonText(readTextFile(path));
}

ExperimentConfig configFromJsonText(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& err) {
    throw InputError(std::string("config json: ") + err.what());
  }
  ExperimentConfig cfg;
  cfg.rdio.numLinear = j.value("num_linear", 1);
  if (j.contains("epsilon") && j["epsilon"].is_number()) {
    cfg.rdio.epsilon = j["epsilon"].get<double>();
  }
  if (j.contains("big_m") && j["big_m"].is_number()) {
    cfg.rdio.bigM = j["big_m"].get<double>();
  }
  const std::string norm = j.value("normalization", "l1proxy");
  if (norm == "l1proxy") {
    cfg.rdio.normalization = inference::Normalization::L1Proxy;
  } else if (norm == "coefficient_box") {
    cfg.rdio.normalization = inference::Normalization::CoefficientBox;
  } else {
    throw InputError("config json: unknown normalization '" + norm + "'");
  }
  for (const auto& t : j.value("templates", json::array())) {
    cfg.rdio.templates.push_back(templateFromJson(t));
  }
  for (const auto& lc : j.value("known_linear", json::array())) {
    cfg.known.knownLinear.push_back({vecFromJson(lc.at("a")), lc.at("b").get<double>()});
  }
  for (const auto& nl : j.value("known_nonlinear", json::array())) {
    cfg.known.knownNonlinear.push_back(
        {templateFromJson(nl.at("template")), vecFromJson(nl.at("q"))});
  }
  if (j.contains("objective")) cfg.objective = objectiveFromJson(j["objective"]);
  return cfg;
}

ExperimentConfig readConfigJson(const std::string& path) {
  return configFromJsonText(readTextFile(path));
}

namespace {

json trialToJson(const harness::TrialResult& t) {
  json out;
  out["seed"] = t.seed;
  out["train_fraction"] = t.trainFraction;
  out["complete"] = t.complete;
  out["status"] = statusName(t.status);
  out["confusion"] = json{{"tp", t.confusion.tp},
                          {"fp", t.confusion.fp},
                          {"fn", t.confusion.fn},
                          {"tn", t.confusion.tn}};
  out["metrics"] = json(t.testMetrics);
  out["feasible_accepted_share"] = t.feasibleAcceptedShare;
  out["accepted_feasible_share"] = t.acceptedFeasibleShare;
  out["stats"] = json{{"nodes", t.stats.nodes},
                      {"lp_solves", t.stats.lpSolves},
                      {"wall_sec", t.stats.wallSec},
                      {"warm_started", t.stats.warmStarted}};
  if (!t.note.empty()) out["note"] = t.note;
  return out;
}

}  // namespace

void writeSweepJson(const harness::SweepResult& result, const std::string& path) {
  json cells = json::array();
  for (const auto& cell : result.cells) {
    json c;
    c["fraction"] = cell.fraction;
    c["failures"] = cell.failures;
    c["mean"] = json(cell.mean);
    c["stddev"] = json(cell.stddev);
    json trials = json::array();
    for (const auto& t : cell.trials) trials.push_back(trialToJson(t));
    c["trials"] = std::move(trials);
    cells.push_back(std::move(c));
  }
  json out;
  out["cells"] = std::move(cells);
  writeTextFile(out.dump(2) + "\n", path);
}

std::string sweepToCsv(const harness::SweepResult& result) {
  const std::vector<std::string> keys = {"accuracy", "precision", "recall", "specificity", "f1"};
  std::ostringstream out;
  out << "fraction";
  for (const auto& key : keys) out << "," << key << "_mean," << key << "_std";
  out << ",failures\n";
  char buf[64];
  for (const auto& cell : result.cells) {
    std::snprintf(buf, sizeof(buf), "%.17g", cell.fraction);
    out << buf;
    for (const auto& key : keys) {
      if (cell.mean.count(key)) {
        std::snprintf(buf, sizeof(buf), "%.17g", cell.mean.at(key));
        out << "," << buf;
        std::snprintf(buf, sizeof(buf), "%.17g", cell.stddev.at(key));
        out << "," << buf;
      } else {
        out << ",,";
      }
    }
    out << "," << cell.failures << "\n";
  }
  return out.str();
}

void writeSweepCsv(const harness::SweepResult& result, const std::string& path) {
  writeTextFile(sweepToCsv(result), path);
}

std::map<std::string, int> readGuidelineMapping(const std::string& path) {
  json j;
  try {
    j = json::parse(readTextFile(path));
  } catch (const json::parse_error& err) {
    throw InputError(std::string("guideline mapping json: ") + err.what());
  }
  std::map<std::string, int> out;
  for (const auto& [key, value] : j.items()) out[key] = value.get<int>();
  return out;
}

}  // namespace rdio::io
