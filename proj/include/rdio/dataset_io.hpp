#pragma once

#include <string>

#include "rdio/model.hpp"

namespace rdio::io {

/**
 * Dataset CSV format: a header row of feature names plus a final `label`
 * column holding `accepted` or `rejected`; one observation per row; decimal
 * reals printed with 17 significant digits so write/read round-trips are
 * bit-identical.
 */
Dataset readDatasetCsv(const std::string& path);
void writeDatasetCsv(const Dataset& dataset, const std::string& path);

std::string datasetToCsv(const Dataset& dataset);
Dataset datasetFromCsv(const std::string& text);

}  // namespace rdio::io
