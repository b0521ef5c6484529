#ifndef RPF_PARAMS_IO_HPP_
#define RPF_PARAMS_IO_HPP_

#include <string>
#include <utility>
#include <vector>

#include "rpf/geometry.hpp"
#include "rpf/ppo.hpp"

namespace rpf {

// Flat key/value views of the tunable parameter structs, used by scenario
// files, config files and `--set key=value` overrides.

std::vector<std::pair<std::string, double>> world_param_fields(const WorldParams& params);
std::vector<std::pair<std::string, double>> ppo_config_fields(const PpoConfig& config);

/// Throws std::invalid_argument for an unknown key or a non-integral value
/// assigned to an integer field.
void set_world_param(WorldParams& params, const std::string& key, double value);
void set_ppo_param(PpoConfig& config, const std::string& key, double value);

bool is_world_param(const std::string& key);
bool is_ppo_param(const std::string& key);

}  // namespace rpf

#endif  // RPF_PARAMS_IO_HPP_
