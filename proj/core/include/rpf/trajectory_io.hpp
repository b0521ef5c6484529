#ifndef RPF_TRAJECTORY_IO_HPP_
#define RPF_TRAJECTORY_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rpf/scenario.hpp"
#include "rpf/simulator.hpp"

namespace rpf {

// Line-delimited trajectory export (UTF-8, LF). Metadata lines start with '#';
// the data block is CSV with the column order below. Step 0 holds the spawn
// state of every robot; step k > 0 holds one row per robot that acted. Reals
// use the shortest round-trip decimal form; absent values are written "nan".
inline constexpr const char* kTrajectoryColumns =
    "step,robot_id,x,y,heading,eta,lambda,reward_total,event_flags";

struct TrajectoryRow {
  int step = 0;
  std::size_t robot = 0;
  Vec2 position;
  double heading = 0.0;
  double eta = 0.0;     // nan when not applicable
  double lambda = 0.0;  // nan when not applicable
  double reward = 0.0;
  std::uint32_t events = 0;
};

struct TrajectoryDocument {
  std::string scenario;
  std::vector<RobotSpawn> robots;
  std::vector<Obstacle> obstacles;
  std::vector<TrajectoryRow> rows;

  /// Positions per robot in step order.
  std::vector<std::vector<Vec2>> trails() const;
};

void write_trajectory(std::ostream& out, const Scenario& scenario, const EpisodeSummary& summary,
                      const std::vector<RewardBreakdown>& initial_rewards = {});
std::string trajectory_to_string(const Scenario& scenario, const EpisodeSummary& summary);

/// Throws std::runtime_error on malformed input; an empty data block is an
/// error ("no records").
TrajectoryDocument read_trajectory(std::istream& in);
TrajectoryDocument load_trajectory(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_real(double value);

}  // namespace rpf

#endif  // RPF_TRAJECTORY_IO_HPP_
