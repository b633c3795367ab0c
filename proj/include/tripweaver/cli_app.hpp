#pragma once

#include <string>
#include <vector>

namespace tripweaver {

// Full command-line surface: gen-data, build-network, plan, eval.
// Exit codes: 0 success (including infeasible-but-valid planning),
// 1 I/O or input-format failure, 2 usage/domain error.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args without argv[0]

}  // namespace tripweaver
