#pragma once

#include <iosfwd>

namespace kellylab::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitEqualityViolated = 1,
  kExitConfigError = 2,
  kExitTooLarge = 3,
};

/// Entry point of the kellylab command line; argv[0] is the program name.
/// Reports go to `out` unless --out is given, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kellylab::cli
