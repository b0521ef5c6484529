#include "rpf/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace rpf {

Vec2 unit(Vec2 a) {
  const double n = norm(a);
  if (!(n > kNormEpsilon)) {
    throw std::domain_error("unit(): vector norm below 1e-12");
  }
  return a / n;
}

Vec2 rotate(Vec2 a, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

double wrap_angle(double angle) {
  double wrapped = std::remainder(angle, 2.0 * kPi);  // [-pi, pi]
  if (wrapped <= -kPi) wrapped += 2.0 * kPi;
  return wrapped;
}

double angle_between(Vec2 a, Vec2 b) {
  return std::atan2(std::abs(cross(a, b)), dot(a, b));
}

Obstacle Obstacle::circle(Vec2 center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("circle obstacle radius must be > 0");
  return Obstacle{Circle{center, radius}};
}

Obstacle Obstacle::rect(Vec2 min, Vec2 max) {
  if (!(min.x < max.x && min.y < max.y)) {
    throw std::invalid_argument("rect obstacle requires min < max componentwise");
  }
  return Obstacle{Rect{min, max}};
}

void WorldParams::validate() const {
  if (!(r > 0.0 && r < d_r)) throw std::invalid_argument("world params: need 0 < r < d_r");
  if (!(rho > 0.0)) throw std::invalid_argument("world params: need rho > 0");
  if (!(v > 0.0)) throw std::invalid_argument("world params: need v > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("world params: need dt > 0");
  if (!(d_m > 0.0)) throw std::invalid_argument("world params: need d_m > 0");
  if (!(f_in_threshold >= 0.0)) throw std::invalid_argument("world params: need f_in_threshold >= 0");
}

namespace {

ObstacleContact circle_contact(Vec2 p, const Circle& c) {
  const Vec2 offset = p - c.center;
  const double n = norm(offset);
  // At the exact centre every surface point is equidistant; pick +x.
  const Vec2 dir = n > kNormEpsilon ? offset / n : Vec2{1.0, 0.0};
  return {c.center + dir * c.radius, n - c.radius, 0};
}

ObstacleContact rect_contact(Vec2 p, const Rect& r) {
  const bool inside = p.x > r.min.x && p.x < r.max.x && p.y > r.min.y && p.y < r.max.y;
  if (!inside) {
    // Outside the arena (or on a wall): penetration depth to the clamped point.
    const Vec2 clamped{std::clamp(p.x, r.min.x, r.max.x), std::clamp(p.y, r.min.y, r.max.y)};
    return {clamped, -distance(p, clamped), 0};
  }
  // Left, right, bottom, top walls; first minimum wins on ties.
  const double d[4] = {p.x - r.min.x, r.max.x - p.x, p.y - r.min.y, r.max.y - p.y};
  const Vec2 s[4] = {{r.min.x, p.y}, {r.max.x, p.y}, {p.x, r.min.y}, {p.x, r.max.y}};
  std::size_t best = 0;
  for (std::size_t k = 1; k < 4; ++k) {
    if (d[k] < d[best]) best = k;
  }
  return {s[best], d[best], 0};
}

}  // namespace

ObstacleContact surface_contact(Vec2 position, const Obstacle& obstacle) {
  return std::visit(
      [&](const auto& shape) {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return circle_contact(position, shape);
        } else {
          return rect_contact(position, shape);
        }
      },
      obstacle.shape);
}

std::optional<ObstacleContact> nearest_obstacle_point(Vec2 position,
                                                      std::span<const Obstacle> obstacles,
                                                      double range) {
  std::optional<ObstacleContact> best;
  for (std::size_t k = 0; k < obstacles.size(); ++k) {
    ObstacleContact c = surface_contact(position, obstacles[k]);
    c.obstacle = k;
    if (!best || c.distance < best->distance) best = c;
  }
  if (best && best->distance > range) return std::nullopt;
  return best;
}

std::vector<std::size_t> visible_neighbors(std::size_t i, std::span<const RobotState> robots,
                                           double range, bool include_arrived) {
  std::vector<std::pair<double, std::size_t>> found;
  const Vec2 p = robots[i].position;
  for (std::size_t j = 0; j < robots.size(); ++j) {
    if (j == i) continue;
    if (!include_arrived && robots[j].status == RobotStatus::Arrived) continue;
    const double d = distance(robots[j].position, p);
    if (d < range) found.emplace_back(d, j);
  }
  std::sort(found.begin(), found.end());
  std::vector<std::size_t> out;
  out.reserve(found.size());
  for (const auto& [d, j] : found) out.push_back(j);
  return out;
}

std::vector<CollisionEvent> collision_check(std::span<const RobotState> robots,
                                            std::span<const Obstacle> obstacles, double r,
                                            bool include_arrived) {
  const auto counted = [&](std::size_t i) {
    return include_arrived || robots[i].status != RobotStatus::Arrived;
  };
  std::vector<CollisionEvent> events;
  for (std::size_t i = 0; i < robots.size(); ++i) {
    if (!counted(i)) continue;
    for (std::size_t k = 0; k < obstacles.size(); ++k) {
      const ObstacleContact c = surface_contact(robots[i].position, obstacles[k]);
      if (c.distance < r) {
        events.push_back({CollisionKind::RobotObstacle, i, k, c.distance});
        break;
      }
    }
  }
  for (std::size_t i = 0; i < robots.size(); ++i) {
    if (!counted(i)) continue;
    for (std::size_t j = i + 1; j < robots.size(); ++j) {
      if (!counted(j)) continue;
      const double d = distance(robots[i].position, robots[j].position);
      if (d < 2.0 * r) events.push_back({CollisionKind::RobotRobot, i, j, d});
    }
  }
  return events;
}

}  // namespace rpf
