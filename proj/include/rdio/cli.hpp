#pragma once

#include <string>
#include <vector>

namespace rdio::cli {

/// Exit codes: 0 success, 1 input error, 2 solver limit, 3 certificate failure.
int dispatch(const std::vector<std::string>& args);

}  // namespace rdio::cli
