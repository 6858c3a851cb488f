#pragma once

#include <string>
#include <vector>

namespace superosc::cli {

/// Exit codes: 0 success, 1 a --assert check failed, 2 usage or runtime error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitAssertFailed = 1;
inline constexpr int kExitError = 2;

/// Entry point shared by the `superosc` executable and the tests.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace superosc::cli
