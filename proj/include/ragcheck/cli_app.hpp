#pragma once

#include <string>
#include <vector>

namespace ragcheck::cli {

// Entry point behind the `ragcheck` binary. Returns the process exit status:
// 0 success, 1 operational failure, 2 usage/validation failure.
int run_command(const std::vector<std::string>& argv);
int run_command(int argc, const char* const* argv);

} // namespace ragcheck::cli
