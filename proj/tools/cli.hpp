#pragma once

#include <iosfwd>

namespace palis::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kFormat = 2,
  kInvariant = 3,
};

/// Runs the `palis` command line. Never throws; returns an ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace palis::cli
