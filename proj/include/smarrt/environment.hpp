#pragma once

#include "smarrt/geometry.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <variant>
#include <vector>

namespace smarrt {

using Rng = std::mt19937_64;

/// Circular obstacle moving in straight legs of random heading and length.
struct DynamicObstacle {
  Point2 position{0.0, 0.0};
  double radius{1.0};
  double speed{0.0};
  double heading{0.0};             // radians in [0, 2pi)
  double remaining_distance{0.0};  // length left on the current leg

  Circle body() const { return Circle{position, radius}; }
};

struct StaticObstacle {
  std::variant<Circle, Rect> shape;
};

bool point_in_static(const Point2& p, const StaticObstacle& obstacle);
bool segment_hits_static(const Segment2& s, const StaticObstacle& obstacle);

/// Longest leg an obstacle may travel before redrawing its heading.
inline constexpr double kMaxLegLength = 10.0;

class DynamicEnvironment {
 public:
  DynamicEnvironment(const Rect& bounds, std::uint64_t seed);

  const Rect& bounds() const { return bounds_; }
  std::span<const StaticObstacle> statics() const { return statics_; }
  std::span<const DynamicObstacle> dynamics() const { return dynamics_; }
  std::vector<DynamicObstacle>& mutable_dynamics() { return dynamics_; }

  /// Throws std::invalid_argument when the shape leaves the bounds.
  void add_static(const StaticObstacle& obstacle);
  /// Throws std::invalid_argument when the body is not fully inside the bounds.
  void add_dynamic(const DynamicObstacle& obstacle);

  /// Advances every obstacle by speed * dt, splitting the motion at leg ends and wall contacts.
  void step(double dt);

  /// One circle per dynamic obstacle, radius = body + 2 * t_u * speed.
  std::vector<Circle> collision_zones(double t_u) const;

  bool robot_in_collision(const Point2& p) const;
  bool point_free_static(const Point2& p) const;
  bool segment_free_static(const Segment2& s) const;

  /// Uniform rejection sample over the bounds outside static obstacles.
  /// Throws std::runtime_error after 10,000 rejections.
  Point2 sample_free(Rng& rng) const;

  Rng& rng() { return rng_; }

 private:
  void advance(DynamicObstacle& o, double dt);
  void redraw_leg(DynamicObstacle& o);
  void redraw_heading_inward(DynamicObstacle& o);
  double distance_to_contact(const DynamicObstacle& o) const;
  bool heading_leaves_contact(const DynamicObstacle& o, double heading) const;

  Rect bounds_;
  std::vector<StaticObstacle> statics_;
  std::vector<DynamicObstacle> dynamics_;
  Rng rng_;
};

inline constexpr int kSampleFreeAttempts = 10'000;

}  // namespace smarrt
