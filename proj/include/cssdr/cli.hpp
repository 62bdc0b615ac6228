#pragma once

#include <string>
#include <vector>

namespace cssdr {

/// Run the command-line tool. Returns the process exit code:
/// 0 on success, 1 on data or numeric errors, 2 on usage errors.
int run_cli(const std::vector<std::string>& args);

}  // namespace cssdr
