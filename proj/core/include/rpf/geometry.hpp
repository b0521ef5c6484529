#ifndef RPF_GEOMETRY_HPP_
#define RPF_GEOMETRY_HPP_

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace rpf {

/// Planar vector. Carries positions (m), velocities (m/s) or unitless forces.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

/// Norms below this are treated as zero for normalisation.
inline constexpr double kNormEpsilon = 1e-12;
inline constexpr double kPi = 3.14159265358979323846;

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Unit vector along `a`. Throws std::domain_error when ||a|| <= kNormEpsilon.
Vec2 unit(Vec2 a);

/// Counter-clockwise rotation by +90 degrees.
constexpr Vec2 rotate90(Vec2 a) { return {-a.y, a.x}; }
Vec2 rotate(Vec2 a, double angle);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);
inline double heading_of(Vec2 a) { return std::atan2(a.y, a.x); }
inline Vec2 from_heading(double heading) { return {std::cos(heading), std::sin(heading)}; }
/// Unsigned angle between two nonzero vectors, in [0, pi].
double angle_between(Vec2 a, Vec2 b);

enum class RobotStatus { Active, Arrived, Collided };

struct RobotState {
  std::size_t id = 0;
  Vec2 position;
  double heading = 0.0;  // rad, (-pi, pi]
  Vec2 goal;
  RobotStatus status = RobotStatus::Active;
  std::vector<Vec2> trail;   // one point per step while Active, starts at the spawn point
  double path_length = 0.0;  // sum of |dp| over the trail

  Vec2 start() const { return trail.empty() ? position : trail.front(); }
  double goal_distance() const { return distance(position, goal); }
  bool active() const { return status == RobotStatus::Active; }
};

struct Circle {
  Vec2 center;
  double radius = 0.0;
};

/// Axis-aligned rectangular arena. The four walls are solid; the interior is
/// free space, so repulsion from a wall points inward.
struct Rect {
  Vec2 min;
  Vec2 max;
};

struct Obstacle {
  std::variant<Circle, Rect> shape;

  /// Throws std::invalid_argument unless radius > 0.
  static Obstacle circle(Vec2 center, double radius);
  /// Throws std::invalid_argument unless min < max componentwise.
  static Obstacle rect(Vec2 min, Vec2 max);
};

/// Sensing, safety and kinematic constants shared by every robot.
struct WorldParams {
  double r = 0.1;               // safe radius (m)
  double d_r = 6.0;             // detection range (m)
  double rho = 10.0;            // obstacle influence range (m)
  double v = 0.5;               // cruise speed (m/s)
  double dt = 0.1;              // step (s)
  double d_m = 10.0;            // dense-reward range (m)
  double f_in_threshold = 1.0;  // wall-following tangent selection threshold

  /// Throws std::invalid_argument if any invariant is violated.
  void validate() const;
};

/// Closest point on the nearest obstacle surface. `distance` is signed:
/// negative when the query point has penetrated the obstacle.
struct ObstacleContact {
  Vec2 surface;
  double distance = 0.0;
  std::size_t obstacle = 0;

  bool penetrating() const { return distance <= 0.0; }
};

/// Signed distance from `position` to a single obstacle surface, with the
/// closest surface point.
ObstacleContact surface_contact(Vec2 position, const Obstacle& obstacle);

/// Nearest obstacle surface within `range`; std::nullopt if nothing is
/// closer than `range` (or there are no obstacles).
std::optional<ObstacleContact> nearest_obstacle_point(Vec2 position,
                                                      std::span<const Obstacle> obstacles,
                                                      double range);

/// Indices j != i with |p_j - p_i| < range, ordered by distance then index.
/// With include_arrived = false, robots parked at their goal are skipped.
std::vector<std::size_t> visible_neighbors(std::size_t i, std::span<const RobotState> robots,
                                           double range, bool include_arrived = true);

enum class CollisionKind { RobotObstacle, RobotRobot };

struct CollisionEvent {
  CollisionKind kind;
  std::size_t robot = 0;
  std::size_t other = 0;  // second robot for RobotRobot, obstacle index otherwise
  double distance = 0.0;

  friend bool operator==(const CollisionEvent&, const CollisionEvent&) = default;
};

/// Robot-obstacle events when d_o < r and robot-robot events when d < 2r.
/// Each unordered robot pair is reported once with robot < other.
std::vector<CollisionEvent> collision_check(std::span<const RobotState> robots,
                                            std::span<const Obstacle> obstacles, double r,
                                            bool include_arrived = true);

}  // namespace rpf

#endif  // RPF_GEOMETRY_HPP_
