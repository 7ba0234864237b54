#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sfm/dynamics.hpp"
#include "sfm/metrics.hpp"
#include "sfm/scenario.hpp"

namespace sfm::cli {

enum ExitCode : int { kOk = 0, kValidationError = 1, kNumericalAbort = 2 };

inline constexpr const char* kOutputRootEnv = "SFM_OUTPUT_ROOT";
inline constexpr const char* kTrajectoryFile = "trajectory.v1.csv";
inline constexpr const char* kMetricsFile = "metrics.v1.json";
inline constexpr const char* kSweepFile = "sweep.v1.csv";
inline constexpr const char* kComparisonFile = "comparison.v1.csv";
inline constexpr const char* kComparisonWideFile = "comparison_wide.v1.csv";

struct CliInvocation {
  std::string subcommand;
  std::filesystem::path scenario;
  std::vector<Variant> variants;
  std::optional<double> dt;
  std::optional<double> duration;
  std::optional<std::uint64_t> seed;
  /// Empty: derived from the output root and the scenario name.
  std::filesystem::path out;
  std::string sweep_param;
  std::vector<double> sweep_values;
  std::size_t workers = 1;
  bool verbose = false;
};

/// Parameters accepted by `sweep`: population attributes, then config keys.
std::vector<std::string> sweep_parameters();

/// Applies one sweep value to every population entry or to the config.
void apply_sweep_value(Scenario& s, SimulationConfig& cfg, const std::string& param, double value);

/// Built-in defaults < scenario defaults < invocation flags.
SimulationConfig resolve_config(const Scenario& s, const CliInvocation& inv);

/// Output directory of an invocation (created by the subcommands).
std::filesystem::path output_dir(const CliInvocation& inv, const Scenario& s);

struct RunResult {
  TrajectoryLog log;
  RunSummary summary;
};

/// Builds the world for `cfg.seed` and runs it to completion.
RunResult execute(const Scenario& s, const SimulationConfig& cfg, const std::string& label);

int cmd_run(const CliInvocation& inv, std::ostream& out, std::ostream& err);
int cmd_sweep(const CliInvocation& inv, std::ostream& out, std::ostream& err);
int cmd_compare(const CliInvocation& inv, std::ostream& out, std::ostream& err);
int cmd_validate(const CliInvocation& inv, std::ostream& out, std::ostream& err);

/// Parses arguments and dispatches. Usage errors return kValidationError.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sfm::cli
