#pragma once

// Command-line front end. Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace friendsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Real-valued amplitude expression: numbers, + - * /, parentheses and sqrt(),
/// e.g. "sqrt(1/3)" or "1/sqrt(2)". Complex literals "re+imi" are also accepted.
std::optional<std::complex<double>> parse_amplitude(std::string_view text);

/// Runs one command. args excludes the program name. CSV goes to `out` unless
/// --out names a file; diagnostics and the resolved configuration go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace friendsim
