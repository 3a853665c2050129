#pragma once

#include <string>
#include <vector>

namespace isoflow {

/// Exit codes: 0 success, 2 config error, 3 numerical failure,
/// 4 flow halted (embeddedness or exterior violation).
int run_command(int argc, char** argv);
int run_command(const std::vector<std::string>& args);

}  // namespace isoflow
