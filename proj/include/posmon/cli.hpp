#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace posmon {

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRefuted = 1;       // a refutation was found and certified
inline constexpr int kExitInconsistent = 2;  // expected vs computed mismatch, failed replay
inline constexpr int kExitUsage = 64;        // unknown instance, element or flag

/// Runs one command; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace posmon
