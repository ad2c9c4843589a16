#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace biphoton::cli {

// sysexits-style codes
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitData = 65;
inline constexpr int kExitIo = 74;

/// Runs one command line (args excludes the program name). Results go to `out` (or to the
/// --out file); errors are written to `err` as a single JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace biphoton::cli
