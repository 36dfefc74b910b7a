#pragma once

#include <string>
#include <vector>

namespace lac {

/// Command-line entry point (generate | aggregate | evaluate | sweep).
/// Returns the process exit code: 0 success, 1 usage error, 2 data
/// validation or I/O error, 3 numerical failure.
int run_cli(const std::vector<std::string>& args);

} // namespace lac
