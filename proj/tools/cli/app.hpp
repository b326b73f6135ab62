#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wpcn::cli {

/// Exit statuses of the `wpcn` executable.
enum ExitCode : int {
  kExitOk = 0,
  kExitUnexpected = 1,
  kExitUsage = 2,
  kExitLibrary = 3,     ///< domain, convergence, stability or search failure
  kExitValidation = 4,  ///< `validate` found a check outside its band
};

/// Parses arguments (argv[0] is the program name) and runs one subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// Convenience overload without a program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wpcn::cli
