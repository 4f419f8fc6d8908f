#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace macroml::cli {

/// Runs the command line (args exclude the program name). Data goes to `out`,
/// diagnostics to stderr. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out);

}  // namespace macroml::cli
