#pragma once

#include <ostream>

namespace jdac {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntimeError = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `jdac` tool: phantom, corrupt, estimate, restore,
/// metrics, pipeline.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace jdac
