#ifndef RPF_PPO_HPP_
#define RPF_PPO_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rpf/observation.hpp"
#include "rpf/policy.hpp"

namespace rpf {

struct PpoConfig {
  double alpha0 = 3e-4;
  double beta = 0.999;
  double gamma = 0.999;
  double epsilon = 0.2;
  double tau = 0.9;
  double c1 = 0.5;
  double c2 = 0.001;
  int batch_steps = 100;  // Z: environment steps between updates
  int epochs = 1;         // K
  int steps_per_episode = 1000;
  int episodes = 1000;

  // Not fixed by the method description; see README.
  int minibatch_size = 64;     // 0 = one gradient step over the whole buffer
  double max_grad_norm = 0.5;  // global L2 clip; 0 disables
  double reward_scale = 0.01;  // rewards are multiplied by this before learning

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// alpha0 * beta^episode.
double lr_schedule(double alpha0, double beta, std::int64_t episode);

struct Transition {
  ObservationInputs obs;
  Eigen::VectorXd raw;     // pre-squash sample
  Eigen::VectorXd action;  // squashed, inside the action box
  double log_prob = 0.0;
  double reward = 0.0;
  double value = 0.0;
  bool done = false;  // the robot's stream ended with this transition
  std::size_t robot_id = 0;
  std::int64_t episode = 0;
  int timestep = 0;
};

/// Transitions from every robot, kept in arrival order. Streams are keyed by
/// (episode, robot); a stream still open when the buffer is consumed needs a
/// bootstrap value for the state after its last transition.
class RolloutBuffer {
 public:
  using StreamKey = std::pair<std::int64_t, std::size_t>;

  void add(Transition t);
  void set_bootstrap(std::int64_t episode, std::size_t robot, double value);
  void clear();

  std::size_t size() const { return transitions_.size(); }
  bool empty() const { return transitions_.empty(); }
  const std::vector<Transition>& transitions() const { return transitions_; }
  std::vector<Transition>& transitions() { return transitions_; }
  const std::map<StreamKey, double>& bootstraps() const { return bootstraps_; }

  /// Stable sort by (timestep, robot_id) within each episode.
  void canonicalize();

 private:
  std::vector<Transition> transitions_;
  std::map<StreamKey, double> bootstraps_;
};

struct AdvantageEstimate {
  Eigen::VectorXd advantages;  // raw GAE, buffer order
  Eigen::VectorXd returns;     // advantages + values (critic targets)
};

/// GAE(gamma, tau) run backwards over each (episode, robot) stream
/// separately. A stream that is not done at its last transition bootstraps
/// from the stored value; a missing bootstrap throws std::logic_error.
AdvantageEstimate compute_advantages(const RolloutBuffer& buffer, double gamma, double tau);

/// Zero mean, unit variance. Fewer than two entries (or zero spread) are only
/// centred.
Eigen::VectorXd normalize_advantages(const Eigen::VectorXd& advantages);

/// min(ratio * A, clip(ratio, 1 - eps, 1 + eps) * A).
double clipped_surrogate(double ratio, double advantage, double epsilon);

struct UpdateStats {
  double policy_loss = 0.0;  // -L_CLIP
  double value_loss = 0.0;   // MSE against the return targets
  double entropy = 0.0;
  double total_loss = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  double grad_norm = 0.0;  // before clipping, last minibatch
  std::size_t samples = 0;
  int gradient_steps = 0;
  bool aborted = false;  // non-finite loss: parameters restored
};

/// One PPO update (K epochs) over the buffer, which is cleared afterwards.
/// Throws std::invalid_argument if the buffer is empty.
UpdateStats ppo_update(PolicyBundle& policy, RolloutBuffer& buffer, const PpoConfig& config,
                       double lr, std::mt19937_64& rng);

}  // namespace rpf

#endif  // RPF_PPO_HPP_
