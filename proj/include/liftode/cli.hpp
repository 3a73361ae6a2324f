#pragma once

#include <ostream>
#include <span>
#include <string>

namespace liftode::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsage = 2;

/// Runs one invocation of the `liftode` tool. `args` excludes the program
/// name. Subcommands: derive, check-paper, verify.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace liftode::cli
