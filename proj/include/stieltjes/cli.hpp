#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace stieltjes::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Runs one subcommand; args exclude the program name. The result document
/// goes to `out`, usage errors to `err`, numerical failures to `out` as JSON.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace stieltjes::cli
