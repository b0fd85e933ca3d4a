#pragma once

#include <string>
#include <vector>

namespace krylov {

// Experiment runner behind the `krylov` binary. Returns the process exit
// code: 0 ok, 2 config error, 3 numerical breakdown, 4 resource guard.
int cli_main(const std::vector<std::string>& args);

}  // namespace krylov
