#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace myosynth::cli {

/// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
enum ExitCode { kOk = 0, kRuntime = 1, kUsage = 2 };

int run(int argc, char** argv);
/// Same as above with explicit streams; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace myosynth::cli
