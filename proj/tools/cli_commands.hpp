#pragma once

#include <string>
#include <vector>

namespace gpool {

// Dispatches a full command line (without argv[0]); returns the process exit
// code. Errors are reported as one machine-readable JSON object on stderr.
int run_cli(std::vector<std::string> args);

}  // namespace gpool
