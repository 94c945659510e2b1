#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kdveq::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kOutsideOrUnbound = 3,
  kInconsistent = 4,
};

/// Runs one command line (without the program name). Machine-readable JSON
/// goes to `out`, human messages to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kdveq::cli
