#include "reflectolab/run_config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include <CLI11.hpp>

#include "reflectolab/serialize.hpp"
#include "reflectolab/stats.hpp"

namespace reflectolab {

namespace {

std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

const std::vector<std::string> kUnhashedKeys{"out", "workers"};

}  // namespace

const std::vector<std::string>& RunConfig::known_keys() {
  static const std::vector<std::string> keys{
      "alpha",  "cases", "coeffs",  "drift", "drift-matrix", "eps",   "esp",   "horizon", "levels",
      "n",      "out",   "p",       "paths", "seed",         "start", "steps", "tol",     "valley",
      "workers"};
  return keys;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end())
    throw ConfigError("unknown configuration key '" + key + "'");
  values_[key] = trim(value);
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key, double fallback, double lo, double hi) const {
  auto it = values_.find(key);
  double v = fallback;
  if (it != values_.end()) {
    try {
      v = parse_double(it->second);
    } catch (const std::exception&) {
      throw ConfigError("'" + key + "' expects a number, got '" + it->second + "'");
    }
  }
  if (!(v >= lo && v <= hi))
    throw ConfigError("'" + key + "' = " + format_double(v) + " outside [" + format_double(lo) + ", " +
                      format_double(hi) + "]");
  return v;
}

std::int64_t RunConfig::get_int(const std::string& key, std::int64_t fallback, std::int64_t lo,
                                std::int64_t hi) const {
  auto it = values_.find(key);
  std::int64_t v = fallback;
  if (it != values_.end()) {
    const std::string& s = it->second;
    char* end = nullptr;
    errno = 0;
    const long long parsed = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0' || errno != 0)
      throw ConfigError("'" + key + "' expects an integer, got '" + s + "'");
    v = parsed;
  }
  if (v < lo || v > hi)
    throw ConfigError("'" + key + "' = " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  return v;
}

std::uint64_t RunConfig::get_seed(std::uint64_t fallback) const {
  auto it = values_.find("seed");
  if (it == values_.end()) return fallback;
  const std::string& s = it->second;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || s[0] == '-' || *end != '\0' || errno != 0)
    throw ConfigError("'seed' expects a nonnegative 64-bit integer, got '" + s + "'");
  return v;
}

std::vector<double> RunConfig::get_list(const std::string& key, std::vector<double> fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(parse_double(item));
    } catch (const std::exception&) {
      throw ConfigError("'" + key + "' expects a comma-separated list of numbers");
    }
  }
  if (out.empty()) throw ConfigError("'" + key + "' is empty");
  return out;
}

std::string RunConfig::canonical() const {
  std::string s = "command=" + command + "\n";
  for (const auto& [k, v] : values_) {
    if (std::find(kUnhashedKeys.begin(), kUnhashedKeys.end(), k) != kUnhashedKeys.end()) continue;
    s += k + "=" + v + "\n";
  }
  return s;
}

std::string RunConfig::hash() const { return fnv1a_hex(canonical()); }

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  RunConfig probe;
  while (std::getline(ss, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key == "command") {
      out[key] = trim(line.substr(eq + 1));
      continue;
    }
    probe.set(key, line.substr(eq + 1));  // rejects unknown keys
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::string usage_text() {
  return "usage: reflectolab <command> [options]\n"
         "\n"
         "commands:\n"
         "  simulate    one Euler path bundle (B, X, Z, Y)\n"
         "  variation   p-variation ladders of Z, Y and the M/A decomposition over an ensemble\n"
         "  hitting     Monte Carlo estimate of P(tau^0 >= tau^1) from H_eps\n"
         "  blowup      total and quadratic variation of Y for GPS from the origin\n"
         "  ladder      neighbor-ladder lower-bound functional for a list of eps\n"
         "  valley      quadratic variation of Y_1 in a valley domain\n"
         "  xi-check    streaming Xi evaluator vs the O(n^2) formula\n"
         "\n"
         "options (all also accepted as `key = value` lines in --config):\n"
         "  --config FILE        flat key/value file; flags override it\n"
         "  --seed N             master seed (fallback: REFLECTOLAB_SEED, then 1)\n"
         "  --paths N            ensemble size\n"
         "  --steps N            grid steps, power of two\n"
         "  --horizon T          time horizon\n"
         "  --eps E              level of H_eps (hitting) or comma list (ladder)\n"
         "  --esp KIND           half-line | gps | valley\n"
         "  --alpha A1,A2,...    GPS weights (sum to 1)\n"
         "  --valley aL,aR,cL,cR valley domain parameters\n"
         "  --coeffs NAME        driftless-identity | constant-drift | linear-drift | zero\n"
         "  --drift B1,...       drift vector for constant-drift\n"
         "  --drift-matrix M..   row-major J x J matrix for linear-drift\n"
         "  --start X1,...       initial point\n"
         "  --levels MIN,MAX     dyadic ladder levels\n"
         "  --p P                variation exponent (variation)\n"
         "  --tol T              boundary tolerance for occupation (simulate)\n"
         "  --n N --cases C      path length and case count (xi-check)\n"
         "  --workers W          worker threads (default: available parallelism)\n"
         "  --out DIR            output root (default: runs)\n";
}

RunConfig parse_command_line(const std::vector<std::string>& args) {
  CLI::App app{"reflectolab"};
  app.set_help_flag();
  app.allow_extras(false);
  std::string command;
  std::string config_file;
  app.add_option("command", command);
  app.add_option("--config", config_file);
  std::map<std::string, std::string> flags;
  for (const auto& key : RunConfig::known_keys()) app.add_option("--" + key, flags[key]);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  RunConfig config;
  std::string file_command;
  if (!config_file.empty()) {
    std::string text;
    try {
      text = read_text_file(config_file);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    for (const auto& [k, v] : parse_config_text(text)) {
      if (k == "command")
        file_command = v;
      else
        config.set(k, v);
    }
  }
  for (const auto& key : RunConfig::known_keys())
    if (app.get_option("--" + key)->count() > 0) config.set(key, flags[key]);
  if (!config.has("seed"))
    if (const char* env = std::getenv("REFLECTOLAB_SEED"); env && *env) config.set("seed", env);

  config.command = command.empty() ? file_command : command;
  if (config.command.empty()) throw ConfigError("no command given");
  const auto& cmds = known_commands();
  if (std::find(cmds.begin(), cmds.end(), config.command) == cmds.end())
    throw ConfigError("unknown command '" + config.command + "'");
  return config;
}

}  // namespace reflectolab
