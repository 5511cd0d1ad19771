#include "rdio/dataset_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rdio/util.hpp"

namespace rdio::io {

namespace {

std::vector<std::string> splitCsvLine(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  std::size_t b = s.find_last_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

}  // namespace

std::string datasetToCsv(const Dataset& dataset) {
  dataset.validate();
  const std::size_t m = dataset.dimension();
  std::ostringstream out;
  for (std::size_t j = 0; j < m; ++j) {
    if (j < dataset.featureNames.size() && !dataset.featureNames[j].empty()) {
      out << dataset.featureNames[j];
    } else {
      out << "f" << (j + 1);
    }
    out << ",";
  }
  out << "label\n";
  char buf[64];
  for (const auto& obs : dataset.observations) {
    for (double v : obs.point) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << buf << ",";
    }
    out << (obs.label == Label::Accepted ? "accepted" : "rejected") << "\n";
  }
  return out.str();
}

Dataset datasetFromCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Dataset ds;
  int lineNo = 0;
  bool headerSeen = false;
  std::size_t m = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto cells = splitCsvLine(stripped);
    if (!headerSeen) {
      if (cells.size() < 2 || trim(cells.back()) != "label") {
        throw InputError("dataset csv line " + std::to_string(lineNo) +
                         ": header must end with a 'label' column");
      }
      m = cells.size() - 1;
      for (std::size_t j = 0; j < m; ++j) ds.featureNames.push_back(trim(cells[j]));
      headerSeen = true;
      continue;
    }
    if (cells.size() != m + 1) {
      throw InputError("dataset csv line " + std::to_string(lineNo) + ": expected " +
                       std::to_string(m + 1) + " cells, found " + std::to_string(cells.size()));
    }
    Observation obs;
    for (std::size_t j = 0; j < m; ++j) {
      const std::string cell = trim(cells[j]);
      errno = 0;
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end == cell.c_str() || *end != '\0' || errno == ERANGE) {
        throw InputError("dataset csv line " + std::to_string(lineNo) + ": bad number '" + cell +
                         "'");
      }
      obs.point.push_back(v);
    }
    const std::string label = trim(cells[m]);
    if (label == "accepted") {
      obs.label = Label::Accepted;
    } else if (label == "rejected") {
      obs.label = Label::Rejected;
    } else {
      throw InputError("dataset csv line " + std::to_string(lineNo) + ": label must be " +
                       "'accepted' or 'rejected', found '" + label + "'");
    }
    ds.observations.push_back(std::move(obs));
  }
  if (!headerSeen) throw InputError("dataset csv: missing header row");
  ds.validate();
  return ds;
}

Dataset readDatasetCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open dataset file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return datasetFromCsv(buf.str());
}

void writeDatasetCsv(const Dataset& dataset, const std::string& path) {
  const std::string text = datasetToCsv(dataset);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write dataset file: " + tmp);
    out << text;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw InputError("cannot move dataset file into place: " + path);
  }
}

}  // namespace rdio::io
