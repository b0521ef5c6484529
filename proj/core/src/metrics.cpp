#include "rpf/metrics.hpp"

#include <numeric>

namespace rpf {

namespace {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double trail_length(std::span<const Vec2> trail, double dt) {
  double total = 0.0;
  for (std::size_t k = 1; k < trail.size(); ++k) {
    const Vec2 velocity = (trail[k] - trail[k - 1]) / dt;
    total += norm(velocity) * dt;
  }
  return total;
}

double trail_smoothness(std::span<const Vec2> trail, double dt) {
  if (trail.size() < 3) return 0.0;
  const std::size_t samples = trail.size() - 1;
  double total = 0.0;
  Vec2 previous = (trail[1] - trail[0]) / dt;
  for (std::size_t k = 2; k < trail.size(); ++k) {
    const Vec2 current = (trail[k] - trail[k - 1]) / dt;
    const double speed = norm(previous);
    if (speed > kNormEpsilon) total += norm(current - previous) / speed;
    previous = current;
  }
  return total / static_cast<double>(samples);
}

MetricReport traveling_distance(std::span<const std::vector<Vec2>> trails, double dt) {
  MetricReport report;
  for (const auto& t : trails) report.per_robot.push_back(trail_length(t, dt));
  report.mean = mean_of(report.per_robot);
  return report;
}

MetricReport motion_smoothness(std::span<const std::vector<Vec2>> trails, double dt) {
  MetricReport report;
  for (const auto& t : trails) report.per_robot.push_back(trail_smoothness(t, dt));
  report.mean = mean_of(report.per_robot);
  return report;
}

EpisodeMetrics evaluate_episode(const EpisodeSummary& summary, double dt) {
  EpisodeMetrics m;
  std::vector<std::vector<Vec2>> trails;
  for (const RobotState& r : summary.robots) {
    if (r.status == RobotStatus::Collided) {
      m.collided.push_back(r.id);
    } else {
      m.included.push_back(r.id);
      trails.push_back(r.trail);
    }
  }
  m.distance = traveling_distance(trails, dt);
  m.smoothness = motion_smoothness(trails, dt);
  m.arrivals = summary.arrivals;
  m.robot_collisions = summary.robot_collisions;
  m.obstacle_collisions = summary.obstacle_collisions;
  m.steps = summary.steps;
  return m;
}

}  // namespace rpf
