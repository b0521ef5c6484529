#ifndef RPF_WALL_FOLLOWING_HPP_
#define RPF_WALL_FOLLOWING_HPP_

#include <optional>

#include "rpf/apf.hpp"
#include "rpf/geometry.hpp"

namespace rpf {

// Region around an obstacle, decided from the force directions alone:
//   A    - f_ar points away from the goal (f_ar . f_a < 0): follow a tangent.
//   B    - repulsion opposes attraction (f_r . f_a < 0) but f_ar still
//          progresses: blend tangent and f_ar (soft rule).
//   Free - plain resultant.
enum class SubArea { Free, A, B };

enum class WallFollowing {
  Off,   // always the raw resultant
  Hard,  // tangent in A, raw resultant elsewhere
  Soft,  // tangent in A, soft blend in B
};

struct TangentPair {
  Vec2 n1;
  Vec2 n2;  // == -n1
};

SubArea classify_subarea(Vec2 f_a, Vec2 f_r, Vec2 f_ar);

/// Tangents to the obstacle at the robot: n1 = rotate90(unit(position - surface)).
/// Throws std::domain_error if the points coincide.
TangentPair tangent_pair(Vec2 position, Vec2 surface_point);

/// Picks the tangent closer in angle to f_in when |f_in| > threshold, otherwise
/// the one closer to the current heading. Exact ties go to n1.
Vec2 select_tangent(const TangentPair& pair, Vec2 heading, Vec2 f_in, double threshold);

/// unit(f_ar + 2|f_r| n). Falls back to n if the sum vanishes.
Vec2 soft_force(Vec2 f_ar, Vec2 f_r, Vec2 tangent);

/// Final steering direction (unit vector) for one robot. Without tangents (no
/// sensed obstacle) the robot is always in the free area. If the resultant
/// vanishes the current heading is kept.
Vec2 plan_direction(const ForceBreakdown& forces, const std::optional<TangentPair>& tangents,
                    Vec2 heading, double threshold, WallFollowing mode = WallFollowing::Soft);

}  // namespace rpf

#endif  // RPF_WALL_FOLLOWING_HPP_
