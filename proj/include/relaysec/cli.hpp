#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace relaysec {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNonConvergence = 3 };

// Runs one subcommand. args excludes the program name.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_dispatch(int argc, char** argv);

}  // namespace relaysec
