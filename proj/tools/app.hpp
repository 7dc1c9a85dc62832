#pragma once
#include <string>
#include <vector>

namespace isac::cli {

/// Entry point behind main(); returns the process exit code:
/// 0 success, 1 configuration/usage error, 2 runtime error.
int app_main(const std::vector<std::string>& args);

}  // namespace isac::cli
