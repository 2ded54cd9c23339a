#pragma once

// Command-line front door: expand, verify and wres, with JSON reports on the
// output stream and a human summary on the error stream.

#include <iosfwd>
#include <string>
#include <vector>

namespace bimetric {

// Exit codes: 0 pass, 1 gated failure, 2 configuration error, 3 numeric
// domain error.
inline constexpr int kExitPass = 0, kExitFail = 1, kExitConfig = 2, kExitDomain = 3;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bimetric
