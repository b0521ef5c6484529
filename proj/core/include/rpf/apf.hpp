#ifndef RPF_APF_HPP_
#define RPF_APF_HPP_

#include <cstddef>
#include <optional>
#include <span>

#include "rpf/geometry.hpp"

namespace rpf {

/// Scale parameters of the potential field. `eta` scales obstacle repulsion,
/// `lambda` sets the inter-robot equilibrium spacing (coefficient vanishes at d = 2*lambda).
struct ApfParams {
  double eta = 0.05;
  double lambda = 2.0;
};

struct ForceBreakdown {
  Vec2 f_a;      // goal attraction
  Vec2 f_r;      // nearest-obstacle repulsion
  Vec2 f_in;     // inter-robot term
  Vec2 f_ar;     // f_a + f_r
  Vec2 f_total;  // f_a + f_r + f_in
};

/// Unit vector toward the goal; zero when the robot sits on its goal.
Vec2 attractive_force(Vec2 position, Vec2 goal);

/// Repulsion eta*(1/d - 1/rho)/d^2 along unit(position - surface); zero beyond rho.
/// Throws std::domain_error when the contact distance is <= 0 (penetration).
Vec2 repulsive_force(Vec2 position, const ObstacleContact& nearest, double eta, double rho);

/// Sum over neighbours of (0.5 - lambda/d_ji) * unit(p_j - p_i).
/// Throws std::domain_error for coincident robots.
Vec2 inter_robot_force(std::size_t i, std::span<const RobotState> robots,
                       std::span<const std::size_t> neighbors, double lambda);

ForceBreakdown resultant(Vec2 f_a, Vec2 f_r, Vec2 f_in);

/// All three terms for robot i; `nearest` is the sensed obstacle contact if any.
ForceBreakdown compute_forces(std::size_t i, std::span<const RobotState> robots,
                              std::span<const std::size_t> neighbors,
                              const std::optional<ObstacleContact>& nearest,
                              const ApfParams& params, double rho);

}  // namespace rpf

#endif  // RPF_APF_HPP_
