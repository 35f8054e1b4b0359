#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace treebench::cli {

// Environment variable consulted when --project is not given.
inline constexpr const char* kProjectEnv = "TREEBENCH_PROJECT";

// Exit codes: 0 success with no error findings, 1 errors or failing
// findings, 2 usage errors.
int run(int argc, const char* const argv[], std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace treebench::cli
