#pragma once

#include <string>
#include <vector>

namespace lf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Entry point of the `lambda_forge` tool. args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace lf::cli
