#pragma once

// Command-line front end. Every subcommand writes one JSON document to out;
// the decision lives in the payload, never in the exit code.

#include <ostream>
#include <string>
#include <vector>

namespace lyapid {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;

// args excludes the program name.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace lyapid
