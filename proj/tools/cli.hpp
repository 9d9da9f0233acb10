#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mcopt::cli {

inline constexpr std::uint64_t kDefaultSeed = 20220601;

/// Runs the `mcopt` command line. `args` excludes the program name.
/// Returns 0 on success, 1 on user error (bad flags or input files) and 2 on
/// internal error; messages go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mcopt::cli
