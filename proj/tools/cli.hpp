#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace collapse {

// Entry point of the collapse-lab command line; returns the process exit code
// (0 success, 1 runtime failure, 2 usage error).
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace collapse
