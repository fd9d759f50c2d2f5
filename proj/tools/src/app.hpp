#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mixsmooth::cli {

enum ExitCode : int {
  kExitPass = 0,
  kExitFail = 1,
  kExitInconclusive = 2,
  kExitUsage = 64,
  kExitIo = 74,
};

/// Runs one command line (args excludes the program name). Reports go to
/// `out` unless --output is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mixsmooth::cli
