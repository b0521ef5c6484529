#ifndef RPF_SCENARIO_HPP_
#define RPF_SCENARIO_HPP_

#include <cstddef>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "rpf/geometry.hpp"

namespace rpf {

struct RobotSpawn {
  Vec2 start;
  Vec2 goal;
};

struct Scenario {
  std::string name;
  std::vector<RobotSpawn> robots;
  std::vector<Obstacle> obstacles;
  WorldParams params;

  /// Throws std::invalid_argument if starts are closer than 2r pairwise or any
  /// start/goal lies within r of an obstacle surface.
  void validate() const;
};

/// Cluttered training arena: 12 m square walls around a 6x6 lattice of
/// circles at 2 m pitch, with random starts and goals.
struct ClutteredLayout {
  double arena_size = 12.0;
  int lattice = 6;
  double pitch = 2.0;
  double spawn_clearance = 0.3;   // from any obstacle surface
  double spawn_separation = 0.5;  // between starts, and between goals
  double min_travel = 3.0;        // start-to-goal distance
  int max_tries = 10000;
};

/// Throws std::runtime_error when rejection sampling exceeds layout.max_tries.
Scenario gen_cluttered(std::mt19937_64& rng, std::size_t n_robots = 6,
                       double obstacle_radius = 0.5, const ClutteredLayout& layout = {});

/// Fraction of the angular spacing 2*pi/n used as the maximum start jitter.
inline constexpr double kCircleJitterFraction = 0.1;

/// n robots evenly spaced on a circle about the origin, each heading to the
/// antipodal point. Passing an rng adds a small angular jitter to each start.
Scenario gen_circle_swap(std::size_t n_robots, double radius, std::mt19937_64* rng = nullptr);

/// Built-in names: circle6, circle8-r3, circle8-r8, cluttered, cluttered-small.
/// Anything else is treated as a scenario file path.
Scenario scenario_by_name(const std::string& name_or_path, std::uint64_t seed);
bool is_builtin_scenario(const std::string& name);

// Scenario documents (JSON); schema in docs/formats.md.
std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& text);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace rpf

#endif  // RPF_SCENARIO_HPP_
