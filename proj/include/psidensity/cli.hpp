#pragma once

// The psidens command line: density, chain, order, verify, limit-density
// and integrability. run() never writes to the process streams; the caller
// prints `output` and `diagnostics`. With --out the document goes to that
// file instead.

#include <string>
#include <vector>

namespace psidensity::cli {

enum ExitCode { kOk = 0, kFailed = 1, kUsage = 2, kNonConvergence = 3 };

struct Result {
  int exit_code = kOk;
  std::string output;       // JSON or CSV document
  std::string diagnostics;  // usage text and error messages
};

/// argv without the program name, e.g. {"density", "--set", "geo2"}.
Result run(const std::vector<std::string>& argv);

/// Log of a cutoff given as "1e24", "2^81", "e^1e12" or any constant
/// expression; evaluated in log form so huge values do not overflow.
double parse_log_cutoff(const std::string& text);

}  // namespace psidensity::cli
