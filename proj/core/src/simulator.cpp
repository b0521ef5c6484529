#include "rpf/simulator.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace rpf {

std::string to_string(PlannerMode mode) {
  switch (mode) {
    case PlannerMode::Rpf:
      return "rpf";
    case PlannerMode::VanillaApf:
      return "apf";
    case PlannerMode::VanillaPpo:
      return "ppo";
  }
  return "unknown";
}

PlannerMode planner_mode_from_string(const std::string& text) {
  if (text == "rpf") return PlannerMode::Rpf;
  if (text == "apf") return PlannerMode::VanillaApf;
  if (text == "ppo") return PlannerMode::VanillaPpo;
  throw std::invalid_argument("unknown planner mode '" + text + "' (expected rpf, apf or ppo)");
}

std::string to_string(WallFollowing mode) {
  switch (mode) {
    case WallFollowing::Off:
      return "off";
    case WallFollowing::Hard:
      return "hard";
    case WallFollowing::Soft:
      return "soft";
  }
  return "unknown";
}

WallFollowing wall_following_from_string(const std::string& text) {
  if (text == "off") return WallFollowing::Off;
  if (text == "hard") return WallFollowing::Hard;
  if (text == "soft") return WallFollowing::Soft;
  throw std::invalid_argument("unknown wall-following mode '" + text +
                              "' (expected off, hard or soft)");
}

void SimConfig::validate() const {
  world.validate();
  if (max_steps < 1) throw std::invalid_argument("sim config: max_steps must be >= 1");
  if (!(apf.eta >= 0.0) || !(apf.lambda >= 0.0)) {
    throw std::invalid_argument("sim config: eta and lambda must be >= 0");
  }
}

Vec2 vanilla_ppo_direction(Vec2 v_current, double a_t) {
  return unit(v_current + rotate90(v_current) * a_t);
}

Simulator::Simulator(SimConfig config, const Scenario& scenario)
    : config_(std::move(config)), obstacles_(scenario.obstacles) {
  config_.validate();
  Scenario checked = scenario;
  checked.params = config_.world;
  checked.validate();

  const std::size_t n = scenario.robots.size();
  robots_.reserve(n);
  returns_.assign(n, 0.0);
  initial_rewards_.assign(n, RewardBreakdown{});
  for (std::size_t i = 0; i < n; ++i) {
    RobotState robot;
    robot.id = i;
    robot.position = scenario.robots[i].start;
    robot.goal = scenario.robots[i].goal;
    robot.trail.push_back(robot.position);
    const Vec2 to_goal = robot.goal - robot.position;
    robot.heading = norm(to_goal) > kNormEpsilon ? heading_of(to_goal) : 0.0;
    if (robot.goal_distance() < config_.world.r) {
      robot.status = RobotStatus::Arrived;
      initial_rewards_[i].r_m = goal_reward(0.0, robot.goal_distance(), true);
      initial_rewards_[i].finalize();
      returns_[i] = initial_rewards_[i].total;
    }
    robots_.push_back(std::move(robot));
  }
}

bool Simulator::acting(std::size_t robot) const {
  const RobotState& r = robots_[robot];
  return r.active() && r.goal_distance() > config_.world.r;
}

bool Simulator::finished() const {
  if (steps_ >= config_.max_steps) return true;
  return std::none_of(robots_.begin(), robots_.end(),
                      [](const RobotState& r) { return r.active(); });
}

Observation Simulator::observe(std::size_t robot) const {
  return build_observation(robot, robots_, obstacles_, config_.world, !config_.park_arrived);
}

StepRecord Simulator::step(Controller* controller) {
  const WorldParams& wp = config_.world;
  StepRecord record;
  record.step = steps_ + 1;

  // Decide every move against the unchanged pre-step state.
  struct Move {
    std::size_t robot;
    Vec2 direction;
    RobotStepRecord info;
  };
  std::vector<Move> moves;
  for (std::size_t i = 0; i < robots_.size(); ++i) {
    if (!acting(i)) continue;
    const RobotState& self = robots_[i];
    const Vec2 heading = from_heading(self.heading);

    ControlAction action{config_.apf, 0.0};
    if (config_.mode != PlannerMode::VanillaApf) {
      if (controller == nullptr) {
        throw std::invalid_argument("Simulator::step: mode " + to_string(config_.mode) +
                                    " requires a controller");
      }
      action = controller->decide(i, observe(i));
    }

    Move move{i, heading, {}};
    move.info.robot = i;
    if (config_.mode == PlannerMode::VanillaPpo) {
      const double a_t = std::clamp(action.steering, -kMaxSteering, kMaxSteering);
      move.info.steering = a_t;
      move.direction = vanilla_ppo_direction(heading, a_t);
    } else {
      const auto neighbors = visible_neighbors(i, robots_, wp.d_r, !config_.park_arrived);
      const auto contact = nearest_obstacle_point(self.position, obstacles_, wp.d_r);
      move.info.apf = action.apf;
      move.info.forces = compute_forces(i, robots_, neighbors, contact, action.apf, wp.rho);
      std::optional<TangentPair> tangents;
      if (contact) tangents = tangent_pair(self.position, contact->surface);
      move.direction = plan_direction(move.info.forces, tangents, heading, wp.f_in_threshold,
                                      config_.wall_following);
    }
    moves.push_back(std::move(move));
  }

  // Explicit Euler at constant speed.
  std::vector<double> previous_heading(robots_.size(), 0.0);
  std::vector<bool> acted(robots_.size(), false);
  for (const Move& m : moves) {
    RobotState& r = robots_[m.robot];
    previous_heading[m.robot] = r.heading;
    acted[m.robot] = true;
    const Vec2 displacement = m.direction * (wp.v * wp.dt);
    r.position += displacement;
    r.heading = heading_of(m.direction);
    r.trail.push_back(r.position);
    r.path_length += norm(displacement);
  }

  for (const CollisionEvent& e : collision_check(robots_, obstacles_, wp.r, !config_.park_arrived)) {
    const bool involves_mover =
        acted[e.robot] || (e.kind == CollisionKind::RobotRobot && acted[e.other]);
    if (involves_mover) record.events.push_back(e);
  }

  for (Move& m : moves) {
    RobotStepRecord& info = m.info;
    for (const CollisionEvent& e : record.events) {
      if (e.kind == CollisionKind::RobotObstacle && e.robot == m.robot) {
        info.events |= kEventObstacleCollision;
      } else if (e.kind == CollisionKind::RobotRobot && (e.robot == m.robot || e.other == m.robot)) {
        info.events |= kEventRobotCollision;
      }
    }
  }

  for (Move& m : moves) {
    RobotState& r = robots_[m.robot];
    RobotStepRecord& info = m.info;
    const bool collided = info.events != 0;
    const bool reached = !collided && r.goal_distance() < wp.r;
    if (collided) r.status = RobotStatus::Collided;
    if (reached) {
      r.status = RobotStatus::Arrived;
      info.events |= kEventArrived;
    }

    RewardBreakdown& rw = info.reward;
    rw.r_m = goal_reward(r.path_length, distance(r.start(), r.goal), reached);
    rw.r_s = smoothness_penalty(previous_heading[m.robot], r.heading);
    rw.r_c = robot_collision_penalty(record.events, m.robot);
    if (const auto c = nearest_obstacle_point(r.position, obstacles_, wp.d_r)) {
      rw.r_o = obstacle_proximity_penalty(c->distance, wp.r);
    }
    rw.r_p = progress_reward(r.goal_distance(), wp.d_m);
    rw.finalize();
    returns_[m.robot] += rw.total;

    info.position = r.position;
    info.heading = r.heading;
    info.done = !r.active();
    record.robots.push_back(std::move(info));
  }

  ++steps_;
  return record;
}

EpisodeSummary run_episode(const SimConfig& config, const Scenario& scenario,
                           Controller* controller, bool keep_records) {
  Simulator sim(config, scenario);
  EpisodeSummary summary;
  summary.scenario = scenario.name;
  while (!sim.finished()) {
    StepRecord rec = sim.step(controller);
    for (const auto& e : rec.events) {
      if (e.kind == CollisionKind::RobotRobot) {
        ++summary.robot_collisions;
      } else {
        ++summary.obstacle_collisions;
      }
    }
    if (keep_records) summary.records.push_back(std::move(rec));
  }
  summary.steps = sim.steps_taken();
  summary.robots.assign(sim.robots().begin(), sim.robots().end());
  summary.returns = sim.returns();
  summary.arrivals = static_cast<int>(
      std::count_if(summary.robots.begin(), summary.robots.end(),
                    [](const RobotState& r) { return r.status == RobotStatus::Arrived; }));
  return summary;
}

}  // namespace rpf
