#ifndef RPF_CLI_COMMANDS_HPP_
#define RPF_CLI_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/config.hpp"
#include "rpf/policy.hpp"

namespace rpf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitAbort = 3;

struct TrainOptions {
  RunConfig config;
  std::vector<std::string> scenarios;  // cycled by episode index
  std::uint64_t seed = 0;
  int episodes = 0;
  int checkpoint_every = 50;
  ActionKind kind = ActionKind::ApfScales;
  std::optional<std::filesystem::path> init;
  std::filesystem::path out;

  nlohmann::ordered_json to_json() const;
  static TrainOptions from_json(const nlohmann::json& j);
};

struct EvalOptions {
  RunConfig config;
  PlannerMode mode = PlannerMode::Rpf;
  std::string scenario;
  std::optional<std::filesystem::path> checkpoint;
  std::uint64_t seed = 0;
  int seeds = 1;
  bool deterministic = false;
  std::filesystem::path out;

  nlohmann::ordered_json to_json() const;
  static EvalOptions from_json(const nlohmann::json& j);
};

/// Scenario seed for training episode `episode`.
std::uint64_t train_scenario_seed(std::uint64_t seed, int episode);

/// Each throws ConfigError before touching the filesystem when the options
/// are unusable, and RunAbort when the run itself fails.
void cmd_train(const TrainOptions& options, std::ostream& out);
void cmd_eval(const EvalOptions& options, std::ostream& out);
/// A trajectory file prints a summary; a run directory or manifest is
/// re-executed into a scratch directory and compared byte for byte.
void cmd_replay(const std::filesystem::path& target, std::ostream& out);
void cmd_plot_trajectory(const std::filesystem::path& trajectory, const std::filesystem::path& svg);
void cmd_plot_reports(const std::vector<std::filesystem::path>& reports,
                      const std::filesystem::path& svg);

/// Full command line, including the program name in argv[0]. Returns the
/// process exit code; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rpf::cli

#endif  // RPF_CLI_COMMANDS_HPP_
