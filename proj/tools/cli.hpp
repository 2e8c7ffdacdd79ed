#ifndef KRIVINE_TOOLS_CLI_HPP
#define KRIVINE_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace krivine::cli {

/// Runs one command line (args[0] is the program name). Returns the process
/// exit code: 0 on success, 1 when a requested --check fails, 2 on usage or
/// input errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace krivine::cli

#endif  // KRIVINE_TOOLS_CLI_HPP
