#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace kdveq {

/// Process-wide, thread-safe log of internal-consistency diagnostics
/// (currently: symbolic/numeric zero-test disagreements).
void report_diagnostic(std::string message);
[[nodiscard]] std::size_t diagnostic_count();
/// Returns and clears everything recorded so far.
std::vector<std::string> take_diagnostics();

}  // namespace kdveq
