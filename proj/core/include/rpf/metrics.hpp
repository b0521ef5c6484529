#ifndef RPF_METRICS_HPP_
#define RPF_METRICS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "rpf/geometry.hpp"
#include "rpf/simulator.hpp"

namespace rpf {

struct MetricReport {
  std::vector<double> per_robot;
  double mean = 0.0;  // 0 for an empty roster
};

/// Path length of one trail: sum over steps of |v(t)| * dt with v(t) = dp/dt.
double trail_length(std::span<const Vec2> trail, double dt);

/// sum_t |v(t) - v(t-1)| / |v(t-1)| divided by the number of velocity samples T.
/// Zero for trails with fewer than two steps; steps with |v| = 0 contribute nothing.
double trail_smoothness(std::span<const Vec2> trail, double dt);

MetricReport traveling_distance(std::span<const std::vector<Vec2>> trails, double dt);
MetricReport motion_smoothness(std::span<const std::vector<Vec2>> trails, double dt);

/// Metrics over the robots that did not collide; collided robots are listed
/// separately and excluded from both means.
struct EpisodeMetrics {
  MetricReport distance;
  MetricReport smoothness;
  std::vector<std::size_t> included;
  std::vector<std::size_t> collided;
  int arrivals = 0;
  int robot_collisions = 0;
  int obstacle_collisions = 0;
  int steps = 0;
};

EpisodeMetrics evaluate_episode(const EpisodeSummary& summary, double dt);

}  // namespace rpf

#endif  // RPF_METRICS_HPP_
