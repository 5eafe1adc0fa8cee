#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sdlnet {

inline constexpr const char* version_string = "sdlnet 0.1.0";

/// Exit codes of the command-line front end.
enum ExitCode : int {
    exit_ok = 0,
    exit_validation_failed = 1,
    exit_input_error = 2,
    exit_internal_fault = 3,
};

/// Runs one command line (args exclude the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sdlnet
