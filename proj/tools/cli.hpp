#pragma once

#include <atomic>
#include <ostream>
#include <string>
#include <vector>

namespace autotune::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPlanError = 2;
inline constexpr int kExitIncompleteStore = 3;
inline constexpr int kExitRuntimeFailure = 4;

/// Environment variable naming the default output directory of `run`.
inline constexpr const char* kOutputDirEnv = "AUTOTUNE_OUTPUT_DIR";

/// Runs the command line `args` (program name excluded). Machine-readable
/// output goes to `out`, diagnostics and progress to `err`. `stop` lets a
/// signal handler interrupt `run`.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
         const std::atomic<bool>* stop = nullptr);

}  // namespace autotune::cli
