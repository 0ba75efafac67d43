#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace reflectolab {

/// Bad or unknown configuration value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exit statuses of the command-line tool.
enum class ExitCode : int {
  ok = 0,
  failure = 1,
  config_error = 2,
  solver_failure = 3,
  capacity_error = 4,
};

inline const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> commands{"simulate", "variation", "hitting", "blowup",
                                                 "ladder",   "valley",    "xi-check"};
  return commands;
}

/// Flat typed key/value configuration of one run. Keys mirror the long flags.
class RunConfig {
 public:
  std::string command;

  /// Sets a key after checking that it is known. Later sets override earlier ones.
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback, double lo, double hi) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback, std::int64_t lo, std::int64_t hi) const;
  std::uint64_t get_seed(std::uint64_t fallback) const;
  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const;

  /// Sorted `key=value` lines without output/scheduling keys (out, workers, config).
  std::string canonical() const;
  /// FNV-1a of canonical().
  std::string hash() const;

  static const std::vector<std::string>& known_keys();

 private:
  std::map<std::string, std::string> values_;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys are rejected.
std::map<std::string, std::string> parse_config_text(const std::string& text);

/// Merges --config file, then flags, then the REFLECTOLAB_SEED fallback.
/// Throws ConfigError on unknown flags/keys or a missing command.
RunConfig parse_command_line(const std::vector<std::string>& args);

std::string usage_text();

/// Executes the run. Artifacts go to <out>/<command>-<hash prefix>/.
/// Returns the exit status; diagnostics are one line on `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// argv front end used by the tool binary.
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace reflectolab
