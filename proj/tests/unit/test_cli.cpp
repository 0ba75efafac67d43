#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "reflectolab/run_config.hpp"
#include "reflectolab/serialize.hpp"

using namespace reflectolab;
namespace fs = std::filesystem;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_main(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("reflectolab-unit-" + name);
  fs::remove_all(p);
  return p;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
  return s;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config text parsing") {
    const auto kv = parse_config_text("# comment\ncommand = hitting\n eps = 0.3 \n\npaths=10 # trailing\n");
    CHECK(kv.at("command") == "hitting");
    CHECK(kv.at("eps") == "0.3");
    CHECK(kv.at("paths") == "10");
    CHECK_THROWS_AS(parse_config_text("no equals sign here\n"), ConfigError);
  }

  TEST_CASE("unknown keys and out-of-range values are rejected") {
    RunConfig c;
    CHECK_THROWS_AS(c.set("bogus", "1"), ConfigError);
    c.set("eps", "1.5");
    CHECK_THROWS_AS(c.get_double("eps", 0.25, 0.0, 1.0), ConfigError);
    c.set("paths", "ten");
    CHECK_THROWS_AS(c.get_int("paths", 1, 1, 100), ConfigError);
    CHECK(invoke({"hitting", "--bogus", "1"}).code == 2);
    CHECK(invoke({"teleport"}).code == 2);
  }

  TEST_CASE("flags override the config file; env seed is a fallback") {
    const auto dir = scratch("cfg");
    fs::create_directories(dir);
    write_text_file(dir / "run.cfg", "command = hitting\neps = 0.3\nseed = 5\n");
    const auto a = parse_command_line({"--config", (dir / "run.cfg").string(), "--eps", "0.4"});
    CHECK(a.command == "hitting");
    CHECK(a.get_double("eps", 0, 0, 1) == 0.4);
    CHECK(a.get_seed(1) == 5);
    ::setenv("REFLECTOLAB_SEED", "99", 1);
    CHECK(parse_command_line({"hitting"}).get_seed(1) == 99);
    CHECK(parse_command_line({"hitting", "--seed", "3"}).get_seed(1) == 3);
    ::unsetenv("REFLECTOLAB_SEED");
    CHECK(parse_command_line({"hitting"}).get_seed(1) == 1);
  }

  TEST_CASE("canonical form ignores output location and worker count") {
    RunConfig a, b;
    a.command = b.command = "hitting";
    a.set("eps", "0.3");
    b.set("eps", "0.3");
    b.set("out", "/elsewhere");
    b.set("workers", "7");
    CHECK(a.hash() == b.hash());
    b.set("seed", "2");
    CHECK(a.hash() != b.hash());
  }

  TEST_CASE("exit codes") {
    const auto empty = invoke({});
    CHECK(empty.code == 2);
    CHECK(empty.err.find("usage:") != std::string::npos);
    const auto dir = scratch("codes");
    CHECK(invoke({"xi-check", "--n", "64", "--cases", "5", "--out", dir.string()}).code == 0);
    CHECK(invoke({"simulate", "--alpha", "0.7,0.7", "--out", dir.string()}).code == 2);
    std::string thirteen;
    for (int i = 0; i < 13; ++i) thirteen += (i ? "," : "") + format_double(1.0 / 13.0);
    CHECK(invoke({"simulate", "--alpha", thirteen, "--steps", "8", "--out", dir.string()}).code == 4);
    CHECK(invoke({"simulate", "--esp", "half-line", "--coeffs", "constant-drift", "--drift", "1e12",
                  "--steps", "8", "--out", dir.string()})
              .code == 3);
  }

  TEST_CASE("repeated runs write byte-identical artifacts") {
    const auto dir = scratch("det");
    const std::vector<std::string> args{"simulate", "--steps", "256", "--seed", "4", "--out", dir.string()};
    const auto first = invoke(args);
    REQUIRE(first.code == 0);
    const fs::path run_dir = trim(first.out);
    std::map<std::string, std::string> before;
    for (const auto& e : fs::directory_iterator(run_dir))
      if (e.path().filename() != "manifest.json") before[e.path().filename().string()] = read_text_file(e.path());
    CHECK(before.count("Z.csv") == 1);
    REQUIRE(invoke(args).code == 0);
    for (const auto& [name, text] : before) CHECK(read_text_file(run_dir / name) == text);
  }
}
