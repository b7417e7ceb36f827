#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "framecommit/lattice.hpp"
#include "framecommit/report.hpp"

namespace framecommit::cli {

/// Stable process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitInvalidConfig = 1,
  kExitBudgetExceeded = 2,
  kExitCheckFailed = 3,
};

/// Overrides the exact-enumeration budget when set.
inline constexpr const char* kBudgetEnvVar = "FRAMECOMMIT_ENUM_BUDGET";

enum class Mode { Exact, MonteCarlo, Both };

std::string to_string(Mode m);
Mode parse_mode(const std::string& text);

struct ExperimentConfig {
  std::string command;
  std::string protocol = "lattice";
  int d = 3;
  int L = 8;
  std::optional<double> eps;
  lattice::Predicate predicate = lattice::Predicate::Lenient;
  std::optional<double> alpha;
  std::string group = "z4";
  std::uint64_t trials = 10'000;
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 42;
  bool seed_defaulted = true;
  std::string output;
  Mode mode = Mode::Exact;
  std::vector<int> d_grid;
  std::vector<int> L_grid;
  std::vector<double> alpha_grid;
  char delimiter = ',';
  std::uint64_t budget = lattice::kDefaultEnumerationBudget;
};

/// Throws InvalidArgument with an actionable message.
void validate(const ExperimentConfig& config);

/// Budget from the environment, or `fallback` when unset.
std::uint64_t budget_from_env(std::uint64_t fallback = lattice::kDefaultEnumerationBudget);

/// Header lines describing the resolved configuration.
void echo_config(Report& report, const ExperimentConfig& config);

int cmd_analyze(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int cmd_twirl_check(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int cmd_mingap(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches; returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace framecommit::cli
