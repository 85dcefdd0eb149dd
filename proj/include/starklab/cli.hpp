#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace starklab {

// exit codes
constexpr int kExitPass = 0, kExitViolation = 1, kExitInput = 2, kExitPrecision = 3;

// argv[0] is the program name
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace starklab
