#include "rpf/reward.hpp"

#include <cmath>

namespace rpf {

double goal_reward(double travelled, double straight_line, bool reached) {
  if (!reached) return 0.0;
  // A robot spawned on its goal has no path to compare against.
  const double ratio = straight_line > 0.0 ? travelled / straight_line : 0.0;
  return 300.0 - 100.0 * ratio;
}

double smoothness_penalty(double previous_heading, double new_heading) {
  return std::abs(wrap_angle(new_heading - previous_heading)) > kSharpTurnThreshold ? -5.0 : 0.0;
}

double robot_collision_penalty(std::span<const CollisionEvent> events, std::size_t robot) {
  for (const auto& e : events) {
    if (e.kind == CollisionKind::RobotRobot && (e.robot == robot || e.other == robot)) {
      return -100.0;
    }
  }
  return 0.0;
}

double obstacle_proximity_penalty(double d_o, double r) {
  if (d_o < r) return -100.0;
  if (d_o < 2.0 * r) return -20.0;
  return 0.0;
}

double progress_reward(double d_g, double d_m) {
  return d_g < d_m ? 1.0 - d_g / d_m : 0.0;
}

}  // namespace rpf
