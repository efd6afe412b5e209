#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "pmedian/solvers.hpp"

namespace pmedian::cli {

enum class Command { Median, Mean, SweepUnivariate, SweepMultivariate, Breakdown, Perturbation };

const char* to_string(Command c) noexcept;
std::optional<Command> parse_command(const std::string& name);

/// Exit codes of the pmedian tool.
enum ExitCode : int { kOk = 0, kBadConfig = 2, kBadDataset = 3, kNumericFailure = 4 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fully resolved run configuration. Unset optionals take per-command
/// defaults when the run starts.
struct RunConfig {
  std::optional<Command> command;
  std::string input;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::optional<std::vector<double>> alphas;
  std::optional<int> n;
  std::optional<int> d;
  std::optional<double> rho;
  std::optional<int> trials;
  SolverConfig solver;
  bool emit_svg = false;
  double weight_contaminated = 0.4;
  std::optional<std::vector<double>> radii;
  std::optional<std::vector<double>> epsilons;
  double reference_sigma = 0.70710678118654752440;
};

/// Parses "0,0.05,0.1" into numbers; throws ConfigError.
std::vector<double> parse_number_list(const std::string& text);

/// Applies the keys of a config document onto `base`. Keys mirror the
/// command-line flags (e.g. "max-iters", "alphas"). Unknown keys are errors.
RunConfig apply_config_json(RunConfig base, const nlohmann::json& doc);

/// Builds the configuration from argv: config file first, flags on top.
/// Returns nullopt when only help was requested (already printed to `out`).
std::optional<RunConfig> parse_command_line(int argc, const char* const* argv, std::ostream& out);

/// Worker count: hardware concurrency capped by PRODUCT_MEDIAN_THREADS.
int resolve_thread_count();

/// Executes the run and writes artifacts under out_dir. Failures are
/// reported on `err` as one JSON error record; the return value is the exit code.
int run(const RunConfig& config, std::ostream& log, std::ostream& err);

/// argv entry point used by the pmedian binary.
int main_entry(int argc, const char* const* argv, std::ostream& log, std::ostream& err);

nlohmann::json config_to_json(const RunConfig& config);

}  // namespace pmedian::cli
