#pragma once

// Command-line driver. run_cli() is the whole program minus process exit so
// tests can call it in-process.

#include <ostream>
#include <string>
#include <vector>

namespace steerfid::cli {

enum ExitCode : int {
  kOk = 0,
  kUnexpected = 1,
  kConfigError = 2,
  kSolverError = 3,
  kConsistencyError = 4,
};

// Tolerance of the oracle <= benchmark ordering checked by `compare`.
inline constexpr double kOrderingTolerance = 1e-4;

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace steerfid::cli
