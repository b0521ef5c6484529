#include "rpf/wall_following.hpp"

#include <stdexcept>

namespace rpf {

SubArea classify_subarea(Vec2 f_a, Vec2 f_r, Vec2 f_ar) {
  if (dot(f_ar, f_a) < 0.0) return SubArea::A;
  if (dot(f_r, f_a) < 0.0) return SubArea::B;
  return SubArea::Free;
}

TangentPair tangent_pair(Vec2 position, Vec2 surface_point) {
  const Vec2 outward = position - surface_point;
  if (!(norm(outward) > kNormEpsilon)) {
    throw std::domain_error("tangent_pair: robot position coincides with surface point");
  }
  const Vec2 n1 = rotate90(unit(outward));
  return {n1, -n1};
}

Vec2 select_tangent(const TangentPair& pair, Vec2 heading, Vec2 f_in, double threshold) {
  const Vec2 reference = norm(f_in) > threshold ? f_in : heading;
  // n1 and n2 are antiparallel unit vectors, so the smaller angle to the
  // reference belongs to whichever has the non-negative projection.
  return angle_between(pair.n2, reference) < angle_between(pair.n1, reference) ? pair.n2
                                                                                : pair.n1;
}

Vec2 soft_force(Vec2 f_ar, Vec2 f_r, Vec2 tangent) {
  const Vec2 blended = f_ar + tangent * (2.0 * norm(f_r));
  if (!(norm(blended) > kNormEpsilon)) return tangent;
  return unit(blended);
}

Vec2 plan_direction(const ForceBreakdown& forces, const std::optional<TangentPair>& tangents,
                    Vec2 heading, double threshold, WallFollowing mode) {
  const auto free_direction = [&] {
    return norm(forces.f_total) > kNormEpsilon ? unit(forces.f_total) : heading;
  };
  if (mode == WallFollowing::Off || !tangents) return free_direction();

  switch (classify_subarea(forces.f_a, forces.f_r, forces.f_ar)) {
    case SubArea::A:
      return select_tangent(*tangents, heading, forces.f_in, threshold);
    case SubArea::B:
      if (mode == WallFollowing::Soft) {
        return soft_force(forces.f_ar, forces.f_r,
                          select_tangent(*tangents, heading, forces.f_in, threshold));
      }
      return free_direction();
    case SubArea::Free:
      break;
  }
  return free_direction();
}

}  // namespace rpf
