#include <vector>

#include "rdio/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rdio::cli::dispatch(args);
}
