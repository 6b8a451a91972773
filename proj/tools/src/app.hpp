#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace expcorr::cli {

/// Parses `args` (without the program name) and runs the selected command.
/// Returns the process exit status: 0 valid / success, 2 validity test
/// rejected, 1 any error (diagnostic written to `err`).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace expcorr::cli
