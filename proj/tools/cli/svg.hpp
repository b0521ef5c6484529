#ifndef RPF_CLI_SVG_HPP_
#define RPF_CLI_SVG_HPP_

#include <string>
#include <vector>

#include "rpf/trajectory_io.hpp"

namespace rpf::cli {

/// Standalone SVG: obstacle outlines, one coloured polyline per robot, hollow
/// circles at starts and crosses at goals. Throws ConfigError on a document
/// without robots or records.
std::string trajectory_svg(const TrajectoryDocument& doc);

struct MetricBar {
  std::string label;
  double distance = 0.0;    // mean l
  double smoothness = 0.0;  // mean xi
};

/// Two side-by-side bar groups (l and xi), one bar per entry.
std::string metrics_bar_svg(const std::vector<MetricBar>& bars);

}  // namespace rpf::cli

#endif  // RPF_CLI_SVG_HPP_
