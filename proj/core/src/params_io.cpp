#include "rpf/params_io.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rpf {

namespace {

struct WorldField {
  const char* key;
  double WorldParams::*member;
};

constexpr WorldField kWorldFields[] = {
    {"r", &WorldParams::r},     {"d_r", &WorldParams::d_r},
    {"rho", &WorldParams::rho}, {"v", &WorldParams::v},
    {"dt", &WorldParams::dt},   {"d_m", &WorldParams::d_m},
    {"f_in_threshold", &WorldParams::f_in_threshold},
};

struct PpoRealField {
  const char* key;
  double PpoConfig::*member;
};

struct PpoIntField {
  const char* key;
  int PpoConfig::*member;
};

constexpr PpoRealField kPpoReals[] = {
    {"alpha0", &PpoConfig::alpha0},
    {"beta", &PpoConfig::beta},
    {"gamma", &PpoConfig::gamma},
    {"epsilon", &PpoConfig::epsilon},
    {"tau", &PpoConfig::tau},
    {"c1", &PpoConfig::c1},
    {"c2", &PpoConfig::c2},
    {"max_grad_norm", &PpoConfig::max_grad_norm},
    {"reward_scale", &PpoConfig::reward_scale},
};

constexpr PpoIntField kPpoInts[] = {
    {"batch_steps", &PpoConfig::batch_steps},
    {"epochs", &PpoConfig::epochs},
    {"steps_per_episode", &PpoConfig::steps_per_episode},
    {"episodes", &PpoConfig::episodes},
    {"minibatch_size", &PpoConfig::minibatch_size},
};

}  // namespace

std::vector<std::pair<std::string, double>> world_param_fields(const WorldParams& params) {
  std::vector<std::pair<std::string, double>> out;
  for (const WorldField& f : kWorldFields) out.emplace_back(f.key, params.*f.member);
  return out;
}

std::vector<std::pair<std::string, double>> ppo_config_fields(const PpoConfig& config) {
  std::vector<std::pair<std::string, double>> out;
  for (const PpoRealField& f : kPpoReals) out.emplace_back(f.key, config.*f.member);
  for (const PpoIntField& f : kPpoInts) out.emplace_back(f.key, config.*f.member);
  return out;
}

void set_world_param(WorldParams& params, const std::string& key, double value) {
  for (const WorldField& f : kWorldFields) {
    if (key == f.key) {
      params.*f.member = value;
      return;
    }
  }
  throw std::invalid_argument("unknown world parameter '" + key + "'");
}

void set_ppo_param(PpoConfig& config, const std::string& key, double value) {
  for (const PpoRealField& f : kPpoReals) {
    if (key == f.key) {
      config.*f.member = value;
      return;
    }
  }
  for (const PpoIntField& f : kPpoInts) {
    if (key == f.key) {
      if (!std::isfinite(value) || std::floor(value) != value ||
          std::abs(value) > static_cast<double>(std::numeric_limits<int>::max())) {
        throw std::invalid_argument("ppo parameter '" + key + "' must be an integer");
      }
      config.*f.member = static_cast<int>(value);
      return;
    }
  }
  throw std::invalid_argument("unknown ppo parameter '" + key + "'");
}

bool is_world_param(const std::string& key) {
  for (const WorldField& f : kWorldFields) {
    if (key == f.key) return true;
  }
  return false;
}

bool is_ppo_param(const std::string& key) {
  for (const PpoRealField& f : kPpoReals) {
    if (key == f.key) return true;
  }
  for (const PpoIntField& f : kPpoInts) {
    if (key == f.key) return true;
  }
  return false;
}

}  // namespace rpf
