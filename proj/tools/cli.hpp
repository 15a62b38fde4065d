#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace splitsea::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalError = 3 };

/// Parses argv, runs one subcommand and returns the process exit code.
/// Primary artifacts go to `out` (or files), diagnostics to `err`.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

/// Flat key=value lines ('#' comments, blank lines ignored) as --key=value
/// tokens.  Throws ConfigError on malformed lines.
std::vector<std::string> config_tokens(const std::string &path);

} // namespace splitsea::cli
