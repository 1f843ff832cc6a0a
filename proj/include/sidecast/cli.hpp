#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>

namespace sidecast {

/// Exit status contract of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

/// sidecast verify | reconstruct | sinc | convergence. Returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// key=value lines, '#' comments and blank lines skipped, whitespace trimmed.
/// Throws ParseError on a line without '=' or with an empty key.
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

} // namespace sidecast
