#pragma once

#include <string>
#include <vector>

namespace thirdq {

/* Command line entry point. Exit codes:
 *   0 success, 2 usage error, 3 unknown preset, 4 malformed model file,
 *   5 invalid parameters or grid, 6 no unique solution, 7 numerical overflow,
 *   1 unexpected error. */
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args without program name

}  // namespace thirdq
