#ifndef RPF_SIMULATOR_HPP_
#define RPF_SIMULATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rpf/apf.hpp"
#include "rpf/geometry.hpp"
#include "rpf/observation.hpp"
#include "rpf/reward.hpp"
#include "rpf/scenario.hpp"
#include "rpf/wall_following.hpp"

namespace rpf {

enum class PlannerMode {
  Rpf,         // (eta, lambda) chosen per robot per step by a controller
  VanillaApf,  // fixed (eta, lambda)
  VanillaPpo,  // controller steers directly
};

std::string to_string(PlannerMode mode);
/// Accepts rpf, apf, ppo. Throws std::invalid_argument otherwise.
PlannerMode planner_mode_from_string(const std::string& text);
std::string to_string(WallFollowing mode);
WallFollowing wall_following_from_string(const std::string& text);

struct SimConfig {
  WorldParams world;
  std::uint64_t seed = 0;
  int max_steps = 1000;
  PlannerMode mode = PlannerMode::VanillaApf;
  WallFollowing wall_following = WallFollowing::Soft;
  ApfParams apf{0.05, 2.0};  // used in VanillaApf mode
  // Arrived robots leave the arena: other robots no longer sense them or
  // collide with them.
  bool park_arrived = false;

  void validate() const;
};

inline constexpr double kMaxSteering = 2.5;

/// What a controller returns for one robot: APF scales in Rpf mode, a
/// steering coefficient in [-2.5, 2.5] in VanillaPpo mode.
struct ControlAction {
  ApfParams apf;
  double steering = 0.0;
};

/// Decision source for Rpf and VanillaPpo modes. Called once per acting robot
/// per step, in robot order, against the pre-step snapshot.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual ControlAction decide(std::size_t robot, const Observation& obs) = 0;
};

enum EventFlag : std::uint32_t {
  kEventRobotCollision = 1u << 0,
  kEventObstacleCollision = 1u << 1,
  kEventArrived = 1u << 2,
};

struct RobotStepRecord {
  std::size_t robot = 0;
  Vec2 position;  // after the step
  double heading = 0.0;
  std::optional<ApfParams> apf;     // set when APF forces were used
  std::optional<double> steering;  // set in VanillaPpo mode
  ForceBreakdown forces;
  RewardBreakdown reward;
  std::uint32_t events = 0;
  bool done = false;
};

struct StepRecord {
  int step = 0;                        // 1-based index of this step
  std::vector<RobotStepRecord> robots;  // robots that acted this step, ascending id
  std::vector<CollisionEvent> events;
};

/// d = unit(v + a_t * rotate90(v)).
Vec2 vanilla_ppo_direction(Vec2 v_current, double a_t);

class Simulator {
 public:
  /// Throws std::invalid_argument on an invalid config or scenario.
  Simulator(SimConfig config, const Scenario& scenario);

  /// Advances every acting robot by one synchronous step.
  StepRecord step(Controller* controller = nullptr);

  bool finished() const;
  int steps_taken() const { return steps_; }
  const SimConfig& config() const { return config_; }
  const WorldParams& params() const { return config_.world; }
  std::span<const RobotState> robots() const { return robots_; }
  std::span<const Obstacle> obstacles() const { return obstacles_; }
  const std::vector<double>& returns() const { return returns_; }
  /// Rewards credited before the first step (robots spawned on their goal).
  const std::vector<RewardBreakdown>& initial_rewards() const { return initial_rewards_; }

  Observation observe(std::size_t robot) const;
  /// Robots the planner moves this step: Active with d_g > r.
  bool acting(std::size_t robot) const;

 private:
  SimConfig config_;
  std::vector<Obstacle> obstacles_;
  std::vector<RobotState> robots_;
  std::vector<double> returns_;
  std::vector<RewardBreakdown> initial_rewards_;
  int steps_ = 0;
};

struct EpisodeSummary {
  std::string scenario;
  std::vector<RobotState> robots;  // final states with full trails
  std::vector<double> returns;
  std::vector<StepRecord> records;  // empty unless requested
  int steps = 0;
  int robot_collisions = 0;
  int obstacle_collisions = 0;
  int arrivals = 0;

  int collisions() const { return robot_collisions + obstacle_collisions; }
};

/// Runs until every robot is Arrived/Collided or max_steps elapse.
EpisodeSummary run_episode(const SimConfig& config, const Scenario& scenario,
                           Controller* controller = nullptr, bool keep_records = true);

}  // namespace rpf

#endif  // RPF_SIMULATOR_HPP_
