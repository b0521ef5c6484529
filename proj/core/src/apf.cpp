#include "rpf/apf.hpp"

#include <stdexcept>

namespace rpf {

Vec2 attractive_force(Vec2 position, Vec2 goal) {
  const Vec2 offset = goal - position;
  const double d = norm(offset);
  if (!(d > kNormEpsilon)) return {};
  return offset / d;
}

Vec2 repulsive_force(Vec2 position, const ObstacleContact& nearest, double eta, double rho) {
  const double d = nearest.distance;
  if (!(d > 0.0)) throw std::domain_error("repulsive_force: robot has penetrated an obstacle");
  if (d > rho) return {};
  const double magnitude = eta * (1.0 / d - 1.0 / rho) / (d * d);
  return unit(position - nearest.surface) * magnitude;
}

Vec2 inter_robot_force(std::size_t i, std::span<const RobotState> robots,
                       std::span<const std::size_t> neighbors, double lambda) {
  Vec2 total;
  const Vec2 p = robots[i].position;
  for (std::size_t j : neighbors) {
    const Vec2 offset = robots[j].position - p;
    const double d = norm(offset);
    if (!(d > kNormEpsilon)) throw std::domain_error("inter_robot_force: coincident robots");
    total += offset * ((0.5 - lambda / d) / d);
  }
  return total;
}

ForceBreakdown resultant(Vec2 f_a, Vec2 f_r, Vec2 f_in) {
  const Vec2 f_ar = f_a + f_r;
  return {f_a, f_r, f_in, f_ar, f_ar + f_in};
}

ForceBreakdown compute_forces(std::size_t i, std::span<const RobotState> robots,
                              std::span<const std::size_t> neighbors,
                              const std::optional<ObstacleContact>& nearest,
                              const ApfParams& params, double rho) {
  const RobotState& self = robots[i];
  const Vec2 f_a = attractive_force(self.position, self.goal);
  const Vec2 f_r = nearest ? repulsive_force(self.position, *nearest, params.eta, rho) : Vec2{};
  const Vec2 f_in = inter_robot_force(i, robots, neighbors, params.lambda);
  return resultant(f_a, f_r, f_in);
}

}  // namespace rpf
