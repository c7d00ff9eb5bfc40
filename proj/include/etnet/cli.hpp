#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace etnet {

inline constexpr const char* kVersion = "1.0.0";

/// Entry point of the command-line tool. Exit status 0 on success, 1 when a solver or check
/// fails, 2 on usage or configuration errors.
int run_command(int argc, const char* const* argv);

/// Same, with the program name omitted and output streams chosen by the caller.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace etnet
