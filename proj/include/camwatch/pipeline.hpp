#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace camwatch {

// One CLI invocation; args exclude the program name. Stage summaries go to
// out as JSON, warnings and error summaries to err. Returns the exit status:
// 0 on success, 1 for a failed stage, 2 for a usage error.
int run_subcommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace camwatch
