#pragma once

#include <string>
#include <vector>

namespace sspd::cli {

/// Entry point of the sspdsim command-line tool (parsing, dispatch, output).
/// Returns the process exit status.  Lives in the library so tests can drive
/// the full surface without spawning processes.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args without the program name

}  // namespace sspd::cli
