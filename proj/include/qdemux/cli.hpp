#pragma once

// Command-line front end. Exit codes: 0 success, 1 usage or validation
// error, 2 runtime error.

#include <string>
#include <vector>

namespace qdemux::cli {

inline constexpr const char* kToolVersion = "0.1.0";

int run(int argc, char** argv);

/// Same as run() with an explicit argument list (argv[0] excluded); output
/// and diagnostics go to the given strings instead of the process streams.
int run_captured(const std::vector<std::string>& args, std::string& out, std::string& err);

}  // namespace qdemux::cli
