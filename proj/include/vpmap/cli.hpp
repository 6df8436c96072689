#pragma once

#include <string>
#include <vector>

namespace vpmap::cli {

// Exit codes: 0 ok, 2 config error, 3 data error, 4 numerical error,
// 5 verification failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;
inline constexpr int kExitVerifyFailed = 5;

// Full command-line entry point; args excludes the program name.
int run(const std::vector<std::string>& args);

} // namespace vpmap::cli
