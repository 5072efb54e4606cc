#pragma once

#include <string>
#include <vector>

namespace ikgate::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitPartial = 2,
    kExitBackend = 3,
};

/// Entry point of the `ikgate` tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);

}  // namespace ikgate::cli
