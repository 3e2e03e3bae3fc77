#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sparcs::pipeline {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;

// Runs one pipeline command. `args` excludes the program name. Returns the
// process exit code: 0 on success, 2 for configuration errors (bad flags,
// unknown model, missing config or mapping file), 3 for data errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sparcs::pipeline
