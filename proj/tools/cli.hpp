#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qcomm::cli {

// Runs one command; args exclude the program name. Returns the process exit
// code: 0 success, 2 validation or usage error, 1 runtime failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qcomm::cli
