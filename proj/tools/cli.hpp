#pragma once

#include <ostream>
#include <span>
#include <string>

namespace eroscan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Runs one `eroscan` invocation. `args` excludes the program name. Errors
/// are reported on `err` as a single `error: <Class>: <message>` line.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace eroscan::cli
