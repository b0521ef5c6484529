#ifndef RPF_POLICY_HPP_
#define RPF_POLICY_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>

#include <Eigen/Dense>

#include "rpf/neural.hpp"
#include "rpf/observation.hpp"
#include "rpf/simulator.hpp"

namespace rpf {

enum class ActionKind : std::uint8_t {
  ApfScales = 0,  // (eta, lambda) in [0, 0.1] x [0, 5]
  Steering = 1,   // a_t in [-2.5, 2.5]
};

struct ActionSpace {
  Eigen::VectorXd low;
  Eigen::VectorXd high;

  static ActionSpace for_kind(ActionKind kind);
  Eigen::Index dim() const { return low.size(); }
  Eigen::VectorXd center() const { return (low + high) / 2.0; }
  Eigen::VectorXd half_width() const { return (high - low) / 2.0; }
  bool contains(const Eigen::VectorXd& action) const;
};

struct PolicyArchitecture {
  std::size_t embedding_width = kDefaultEmbeddingWidth;
  std::size_t hidden_width = 256;
  std::size_t hidden_layers = 2;
  // Pre-squash standard deviation; tanh maps +-1 sigma onto roughly +-0.76 of
  // the half-width, i.e. 0.5 of the half-width in the linear region.
  double initial_std = 0.5;
};

/// The single parameter set shared by every robot: observation encoder,
/// actor (Gaussian mean in pre-squash space + state-independent log-std),
/// critic, and their optimiser moments.
struct PolicyBundle {
  ActionKind kind = ActionKind::ApfScales;
  ActionSpace actions;
  nn::DenseNet encoder;
  nn::DenseNet actor;
  nn::DenseNet critic;
  Eigen::VectorXd log_std;

  nn::AdamState encoder_opt;
  nn::AdamState actor_opt;
  nn::AdamState critic_opt;
  nn::VectorAdamState log_std_opt;

  std::int64_t episodes = 0;  // training episodes completed
  std::int64_t updates = 0;   // PPO updates applied

  static PolicyBundle create(ActionKind kind, std::uint64_t seed,
                             const PolicyArchitecture& arch = {});

  Eigen::VectorXd embed(const ObservationInputs& inputs) const;
  double value(const Eigen::VectorXd& embedded) const;
  bool all_finite() const;
};

/// a = center + half_width * tanh(u), elementwise.
Eigen::VectorXd squash_action(const ActionSpace& space, const Eigen::VectorXd& raw);
/// log |da/du| summed over dimensions.
double squash_log_det(const ActionSpace& space, const Eigen::VectorXd& raw);
double gaussian_log_prob(const Eigen::VectorXd& raw, const Eigen::VectorXd& mean,
                         const Eigen::VectorXd& log_std);
double gaussian_entropy(const Eigen::VectorXd& log_std);

struct ActionSample {
  Eigen::VectorXd action;  // inside the box
  Eigen::VectorXd raw;     // pre-squash Gaussian sample
  double log_prob = 0.0;   // log density of `action`, squash correction included
  double value = 0.0;
};

/// Draws u ~ N(mean(obs), exp(log_std)^2) and squashes it into the box. In
/// deterministic mode u = mean.
ActionSample sample_action(const PolicyBundle& policy, const Eigen::VectorXd& embedded,
                           std::mt19937_64& rng, bool deterministic = false);

ControlAction to_control_action(ActionKind kind, const Eigen::VectorXd& action);
PlannerMode planner_mode_for(ActionKind kind);

/// Controller that queries a fixed policy (no learning, no recording).
class PolicyController : public Controller {
 public:
  PolicyController(const PolicyBundle& policy, const WorldParams& params, std::uint64_t seed,
                   bool deterministic);
  ControlAction decide(std::size_t robot, const Observation& obs) override;

 private:
  const PolicyBundle& policy_;
  WorldParams params_;
  std::mt19937_64 rng_;
  bool deterministic_;
};

// Checkpoint: "RPFPOLCY" magic, format version, then every network, the
// log-std vector, all optimiser moments and the counters as raw
// little-endian bytes. Loading reproduces the bundle bit-for-bit.
inline constexpr std::uint64_t kCheckpointVersion = 1;
void write_policy(std::ostream& out, const PolicyBundle& policy);
PolicyBundle read_policy(std::istream& in);
void save_policy(const PolicyBundle& policy, const std::filesystem::path& path);
PolicyBundle load_policy(const std::filesystem::path& path);

/// FNV-1a hash of the serialised parameters (networks and log-std only).
std::uint64_t parameter_fingerprint(const PolicyBundle& policy);

}  // namespace rpf

#endif  // RPF_POLICY_HPP_
