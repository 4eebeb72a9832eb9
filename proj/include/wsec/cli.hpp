#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wsec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs one `wsec` invocation. `args` excludes the program name.
/// Data goes to `out`; the effective configuration and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace wsec::cli
