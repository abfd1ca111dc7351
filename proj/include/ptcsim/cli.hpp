#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ptcsim {

// Full command-line entry point; args excludes the program name.
// Returns the process exit code: 0 converged/completed, 1 usage or input error,
// 2 instability detected, 3 numerical failure.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ptcsim
