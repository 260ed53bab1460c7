#ifndef KNNLAB_CLI_HPP
#define KNNLAB_CLI_HPP

#include <string>
#include <vector>

namespace knnlab::cli {

// Dispatch a full command line (excluding argv[0]).  Exit status: 0 on
// success, 1 when a check fails (a bound is violated or a witness is found),
// 2 on usage or configuration errors.
int run(const std::vector<std::string>& args);

}  // namespace knnlab::cli

#endif
