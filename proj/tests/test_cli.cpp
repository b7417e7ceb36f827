#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "framecommit/cli.hpp"

using namespace framecommit::cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "framecommit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string value(const std::string& report, const std::string& key) {
  std::istringstream is(report);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind(key + ": ", 0) == 0) return line.substr(key.size() + 2);
  }
  return "<missing>";
}

}  // namespace

TEST_CASE("analyze lattice d=3 L=8 lenient") {
  const auto r = call({"analyze", "--protocol", "lattice", "--d", "3", "--L", "8", "--predicate", "lenient"});
  CHECK(r.code == kExitOk);
  CHECK(value(r.out, "binding_flip_lenient") == "1/3 (0.33333333333333331)");
  CHECK(value(r.out, "binding_flip_strict") == "1/6 (0.16666666666666666)");
  CHECK(value(r.out, "soundness") == "1 (1)");
  CHECK(value(r.out, "concealing_exact") == "1/4 (0.25)");
  CHECK(value(r.out, "seed") == "42 (default)");
  CHECK(value(r.out, "separation_certified") == "true");
}

TEST_CASE("analyze four-symbol and continuous") {
  const auto f = call({"analyze", "--protocol", "four-symbol"});
  CHECK(f.code == kExitOk);
  CHECK(value(f.out, "concealing_exact") == "0 (0)");
  CHECK(value(f.out, "binding_flip_lenient") == "1/2 (0.5)");
  CHECK(value(f.out, "rotation_realization_exact") == "true");
  const auto c = call({"analyze", "--protocol", "continuous", "--alpha", "0.5"});
  CHECK(c.code == kExitOk);
  CHECK(value(c.out, "p_accept_0") == "0.75");
  CHECK(value(c.out, "p_accept_1") == "0.75");
}

TEST_CASE("simulate lattice honest is exactly 1") {
  const auto r = call({"simulate", "--protocol", "lattice", "--trials", "10000"});
  CHECK(r.code == kExitOk);
  CHECK(value(r.out, "soundness") == "1");
  CHECK(value(r.out, "soundness_successes") == "10000");
  CHECK(value(r.out, "binding_flip_within_3sigma") == "true");
}

TEST_CASE("simulate continuous sweep agrees with the closed form") {
  const auto r = call({"simulate", "--protocol", "continuous", "--trials", "10000"});
  CHECK(r.code == kExitOk);
  CHECK(value(r.out, "all_within_3sigma") == "true");
}

TEST_CASE("twirl-check") {
  CHECK(call({"twirl-check", "--group", "z4"}).code == kExitOk);
  CHECK(value(call({"twirl-check", "--group", "z4"}).out, "verdict") == "pass");
  const auto h = call({"twirl-check", "--group", "haar", "--samples", "100000", "--seed", "42"});
  CHECK(h.code == kExitOk);
  CHECK(value(h.out, "verdict") == "pass");
  const auto m = call({"twirl-check", "--group", "mixture"});
  CHECK(m.code == kExitInvalidConfig);
  CHECK(m.err.find("not a uniform group distribution") != std::string::npos);
  CHECK(call({"twirl-check", "--group", "z0"}).code == kExitInvalidConfig);
}

TEST_CASE("mingap") {
  const auto a = call({"mingap", "--d", "1", "--L", "2"});
  CHECK(a.code == kExitOk);
  CHECK(value(a.out, "min_gap") == "0.52359877559829882");  // pi/6
  const auto safe = call({"mingap", "--d", "3", "--L", "8"});
  const double s = std::stod(value(safe.out, "max_safe_eps"));
  CHECK(call({"mingap", "--d", "3", "--L", "8", "--eps", std::to_string(s / 2)}).code == kExitOk);
  const auto fail = call({"mingap", "--d", "3", "--L", "8", "--eps", std::to_string(2 * s)});
  CHECK(fail.code == kExitCheckFailed);
  CHECK(value(fail.out, "verdict") == "fail");
}

TEST_CASE("exit codes") {
  CHECK(call({"analyze", "--d", "0"}).code == kExitInvalidConfig);
  CHECK(call({"analyze", "--L", "1"}).code == kExitInvalidConfig);
  CHECK(call({"analyze", "--protocol", "nope"}).code == kExitInvalidConfig);
  CHECK(call({"analyze", "--predicate", "maybe"}).code == kExitInvalidConfig);
  CHECK(call({"analyze", "--mode", "fast"}).code == kExitInvalidConfig);
  CHECK(call({"analyze", "--alpha", "2", "--protocol", "continuous"}).code == kExitInvalidConfig);
  CHECK(call({"bogus"}).code == kExitInvalidConfig);
  CHECK(call({}).code == kExitInvalidConfig);
  CHECK(call({"analyze", "--d", "3", "--L", "8", "--eps", "1"}).code == kExitCheckFailed);
  CHECK(call({"mingap", "--d", "12", "--L", "8"}).code == kExitBudgetExceeded);
}

TEST_CASE("budget override from the environment") {
  ::setenv(kBudgetEnvVar, "500", 1);
  CHECK(call({"mingap", "--d", "3", "--L", "8"}).code == kExitBudgetExceeded);
  ::setenv(kBudgetEnvVar, "junk", 1);
  CHECK(call({"mingap", "--d", "3", "--L", "8"}).code == kExitInvalidConfig);
  ::unsetenv(kBudgetEnvVar);
  CHECK(call({"mingap", "--d", "3", "--L", "8"}).code == kExitOk);
}

TEST_CASE("sweep tables") {
  const auto r = call({"sweep", "--d-grid", "1,2", "--L-grid", "4,8", "--delimiter", ";"});
  CHECK(r.code == kExitOk);
  std::istringstream is(r.out);
  std::string line;
  int rows = 0, comments = 0;
  while (std::getline(is, line)) {
    if (line.rfind("#", 0) == 0) {
      ++comments;
    } else {
      ++rows;
      CHECK(line.find(';') != std::string::npos);
    }
  }
  CHECK(comments > 5);
  CHECK(rows == 5);
  CHECK(r.out.find("2;8;") != std::string::npos);
  const auto c = call({"sweep", "--protocol", "continuous", "--alpha-grid", "0,0.5,1"});
  CHECK(c.out.find("0.5,0.75,0.75,1.5") != std::string::npos);
  CHECK(call({"sweep", "--delimiter", "ab"}).code == kExitInvalidConfig);
}

TEST_CASE("every command is byte-identical for the same config and seed") {
  const std::vector<std::vector<std::string>> cmds = {
      {"analyze", "--d", "2", "--L", "4", "--mode", "both", "--trials", "3000", "--seed", "9"},
      {"simulate", "--protocol", "four-symbol", "--trials", "3000", "--seed", "9"},
      {"simulate", "--protocol", "continuous", "--trials", "2000", "--seed", "9"},
      {"twirl-check", "--group", "haar", "--samples", "20000", "--seed", "9"},
      {"twirl-check", "--group", "z8"},
      {"mingap", "--d", "2", "--L", "8"},
      {"sweep", "--protocol", "continuous", "--mode", "both", "--trials", "2000"},
  };
  for (const auto& c : cmds) {
    const auto a = call(c);
    const auto b = call(c);
    CHECK(a.code == kExitOk);
    CHECK(a.out == b.out);
  }
  CHECK(call({"simulate", "--seed", "1", "--trials", "2000"}).out != call({"simulate", "--seed", "2", "--trials", "2000"}).out);
}
