#include <iostream>
#include <string>
#include <vector>

#include "psidensity/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const auto res = psidensity::cli::run(args);
  std::cout << res.output;
  std::cerr << res.diagnostics;
  return res.exit_code;
}
