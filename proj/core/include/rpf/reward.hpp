#ifndef RPF_REWARD_HPP_
#define RPF_REWARD_HPP_

#include <cstddef>
#include <span>

#include "rpf/geometry.hpp"

namespace rpf {

// Reward terms are named by what they respond to. r_c is the robot-robot
// collision penalty and r_o the obstacle proximity penalty.
struct RewardBreakdown {
  double r_m = 0.0;  // goal arrival
  double r_s = 0.0;  // heading smoothness
  double r_c = 0.0;  // robot-robot collision
  double r_o = 0.0;  // obstacle proximity
  double r_p = 0.0;  // dense goal progress
  double total = 0.0;

  void finalize() { total = r_m + r_s + r_c + r_o + r_p; }
};

inline constexpr double kSharpTurnThreshold = kPi / 4.0;

/// 300 - 100 * d_a / d_s on arrival, else 0.
double goal_reward(double travelled, double straight_line, bool reached);
/// -5 when the wrapped heading change exceeds 45 degrees.
double smoothness_penalty(double previous_heading, double new_heading);
/// -100 if robot `robot` appears in a robot-robot event.
double robot_collision_penalty(std::span<const CollisionEvent> events, std::size_t robot);
/// -100 below r, -20 in [r, 2r), else 0.
double obstacle_proximity_penalty(double d_o, double r);
/// 1 - d_g/d_m inside d_m, else 0.
double progress_reward(double d_g, double d_m);

}  // namespace rpf

#endif  // RPF_REWARD_HPP_
