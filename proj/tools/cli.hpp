// Command-line front end shared by the matherkit executable and the tests.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace matherkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNotConverged = 2;

/// Runs one subcommand. args excludes the program name.
/// Returns 0 on success, 2 when a solver did not converge (outputs are still
/// written and flagged) and 1 on usage or config errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace matherkit::cli
