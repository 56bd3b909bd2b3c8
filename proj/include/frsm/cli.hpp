// Command-line front end. Exit codes: 0 success, 1 runtime failure or failed
// check, 2 usage, configuration or file-format error.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace frsm {

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace frsm
