#ifndef RPF_TRAINER_HPP_
#define RPF_TRAINER_HPP_

#include <cstdint>
#include <random>
#include <string>

#include "rpf/policy.hpp"
#include "rpf/ppo.hpp"
#include "rpf/scenario.hpp"
#include "rpf/simulator.hpp"

namespace rpf {

struct EpisodeLog {
  std::int64_t episode = 0;  // 0-based index of the episode just finished
  std::string scenario;
  double return_mean = 0.0;
  double return_min = 0.0;
  double return_max = 0.0;
  double policy_loss = 0.0;  // averaged over the updates run during the episode
  double value_loss = 0.0;
  double entropy = 0.0;
  double lr = 0.0;
  int updates = 0;
  int collisions = 0;
  int arrivals = 0;
  int robots = 0;
  int steps = 0;
  bool aborted = false;  // an update hit a non-finite loss

  /// One JSON object, no trailing newline.
  std::string to_json() const;
};

/// Shared-policy PPO training loop. Every acting robot samples from the same
/// PolicyBundle; updates fire every `batch_steps` simulator steps counted
/// across episode boundaries.
class Trainer {
 public:
  /// `sim.mode` is overridden to match the policy's action kind and
  /// `sim.max_steps` by `ppo.steps_per_episode`.
  Trainer(PolicyBundle& policy, PpoConfig ppo, SimConfig sim, std::uint64_t seed);

  EpisodeLog train_episode(const Scenario& scenario);

  const RolloutBuffer& buffer() const { return buffer_; }
  std::int64_t global_steps() const { return global_steps_; }
  const SimConfig& sim_config() const { return sim_; }
  const PpoConfig& ppo_config() const { return ppo_; }

 private:
  PolicyBundle& policy_;
  PpoConfig ppo_;
  SimConfig sim_;
  std::mt19937_64 rng_;
  RolloutBuffer buffer_;
  std::int64_t global_steps_ = 0;
};

}  // namespace rpf

#endif  // RPF_TRAINER_HPP_
