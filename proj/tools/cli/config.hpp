#ifndef RPF_CLI_CONFIG_HPP_
#define RPF_CLI_CONFIG_HPP_

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "rpf/ppo.hpp"
#include "rpf/simulator.hpp"

namespace rpf::cli {

/// Bad flags, config files or inputs. Maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Failure after a run has started. Maps to exit code 3.
struct RunAbort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Everything a command can be configured with. Defaults are the training and
// evaluation constants; a config file and then `--set` / dedicated flags
// override them in that order.
struct RunConfig {
  WorldParams world;
  PpoConfig ppo;
  WallFollowing wall_following = WallFollowing::Soft;
  bool park_arrived = false;
  ApfParams apf{0.05, 2.0};
  int max_steps = 1000;  // evaluation episode length

  SimConfig sim_config(PlannerMode mode, std::uint64_t seed) const;
  nlohmann::ordered_json to_json() const;
  void validate() const;  // throws ConfigError
};

/// Reads {"world": {...}, "ppo": {...}, "sim": {...}}; unknown sections or
/// keys are errors.
void apply_config_json(RunConfig& config, const nlohmann::json& doc);
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

/// One `key=value` assignment. Keys are world and PPO field names plus
/// eta, lambda, max_steps, park_arrived and wall_following.
void apply_override(RunConfig& config, const std::string& assignment);

}  // namespace rpf::cli

#endif  // RPF_CLI_CONFIG_HPP_
