#pragma once

#include <string>
#include <vector>

namespace tsbench {

/// Entry point of the `tsbench` tool. Returns the process exit code: 0 on
/// success, 1 on runtime failure (including an unreadable config), 2 on a
/// usage error.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args);

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "TSBENCH_OUT";

}  // namespace tsbench
