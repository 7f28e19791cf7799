#pragma once

#include <string>
#include <vector>

namespace wabe {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Runs the wabe-splat command line. Diagnostics go to stderr.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args);

}  // namespace wabe
