#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace todaq::cli {

// Exit codes: 0 success, 1 a check failed, 2 usage or configuration error.
// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace todaq::cli
