#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace infodemic {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitEnvironment = 3;
inline constexpr int kExitUsage = 64;

// Entry point of the `infodemic` binary. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace infodemic
