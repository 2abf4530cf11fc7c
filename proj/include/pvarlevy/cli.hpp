#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pvarlevy::cli {

/// Exit codes of `run`.
enum ExitCode : int { kOk = 0, kInternal = 1, kValidation = 2, kNumerical = 3 };

/// Entry point of the `pvarlevy` tool; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pvarlevy::cli
