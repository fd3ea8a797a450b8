// Command-line front end: argument parsing and subcommand dispatch.
#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hysmax::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;  // also: a validation check failed

enum class Subcommand { point_loop, cavity_run, validate, report, version };

struct Command {
  Subcommand subcommand = Subcommand::version;
  std::optional<std::string> config_path;
  std::optional<std::string> output_dir;
  std::vector<std::string> overrides;  // "dotted.key=value", applied after the file
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by parse_args for -h/--help; what() is the help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws UsageError on unknown subcommands, bad options or a missing
/// --config where one is required.
Command parse_args(int argc, const char* const* argv);

/// Execute a parsed command. Output is `key=value` lines on `out`.
/// Errors propagate as exceptions.
int dispatch(const Command& cmd, std::ostream& out);

/// parse_args + dispatch with every error mapped to an exit code and a
/// message on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hysmax::cli
