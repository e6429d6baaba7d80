#pragma once

// Command-line front end. Subcommands: supercrit, bsc, oracle, donsker,
// doobmeyer, localtime, dump.
//
// Exit codes: 0 when every check passes (or nothing is checked), 1 when a
// check fails or a run cannot complete, 2 on invalid flags or parameters.

#include <iosfwd>
#include <string>
#include <vector>

namespace sbfw::cli {

inline constexpr const char* kToolName = "sbfw";
inline constexpr const char* kToolVersion = "0.1.0";

/// Runs one command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses a key=value config file into flag tokens (`--key value`, or
/// `--key` for a true boolean). Blank lines and lines starting with '#' are
/// skipped; underscores in keys are read as dashes. Throws std::runtime_error
/// on an unreadable file or a line without '='.
std::vector<std::string> config_to_args(const std::string& path);

}  // namespace sbfw::cli
