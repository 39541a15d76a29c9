#include "smarrt/environment.hpp"

#include <limits>
#include <numbers>
#include <stdexcept>

namespace smarrt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxEventsPerStep = 1000;
constexpr int kMaxHeadingDraws = 1000;

Point2 direction(double heading) { return {std::cos(heading), std::sin(heading)}; }

// Distance along u before a body centred at p touches an inflated circle. Zero when already
// touching and not moving away; infinity when it never touches.
double contact_with_circle(const Point2& p, const Point2& u, const Circle& c) {
  const Point2 rel = p - c.center;
  const double r2 = c.radius * c.radius;
  const double along = rel.dot(u);
  if (rel.squaredNorm() <= r2) return along < 0.0 ? 0.0 : kInf;
  if (along >= 0.0) return kInf;
  const double disc = along * along - (rel.squaredNorm() - r2);
  if (disc < 0.0) return kInf;
  return -along - std::sqrt(disc);
}

double contact_with_box(const Point2& p, const Point2& u, const Rect& box) {
  if (point_in_rect(p, box)) {
    // Leave through the face of least penetration.
    const double faces[4] = {p.x() - box.min.x(), box.max.x() - p.x(), p.y() - box.min.y(),
                             box.max.y() - p.y()};
    const Point2 normals[4] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
    int best = 0;
    for (int i = 1; i < 4; ++i) {
      if (faces[i] < faces[best]) best = i;
    }
    return u.dot(normals[best]) > 0.0 ? kInf : 0.0;
  }
  double t_enter = 0.0;
  double t_exit = kInf;
  for (int axis = 0; axis < 2; ++axis) {
    if (u[axis] == 0.0) {
      if (p[axis] < box.min[axis] || p[axis] > box.max[axis]) return kInf;
      continue;
    }
    double t0 = (box.min[axis] - p[axis]) / u[axis];
    double t1 = (box.max[axis] - p[axis]) / u[axis];
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
  }
  if (t_exit <= t_enter) return kInf;
  return t_enter;
}

double contact_with_static(const Point2& p, const Point2& u, double body, const StaticObstacle& s) {
  if (const auto* c = std::get_if<Circle>(&s.shape)) {
    return contact_with_circle(p, u, Circle{c->center, c->radius + body});
  }
  const auto& r = std::get<Rect>(s.shape);
  const Point2 pad(body, body);
  return contact_with_box(p, u, Rect{r.min - pad, r.max + pad});
}

}  // namespace

bool point_in_static(const Point2& p, const StaticObstacle& obstacle) {
  return std::visit(
      [&](const auto& shape) {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return point_in_circle(p, shape);
        } else {
          return point_in_rect(p, shape);
        }
      },
      obstacle.shape);
}

bool segment_hits_static(const Segment2& s, const StaticObstacle& obstacle) {
  return std::visit(
      [&](const auto& shape) {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return segment_intersects_circle(s, shape);
        } else {
          return segment_intersects_rect(s, shape);
        }
      },
      obstacle.shape);
}

DynamicEnvironment::DynamicEnvironment(const Rect& bounds, std::uint64_t seed)
    : bounds_(make_rect(bounds.min, bounds.max)), rng_(seed) {}

void DynamicEnvironment::add_static(const StaticObstacle& obstacle) {
  const bool inside = std::visit(
      [&](const auto& shape) {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, Circle>) {
          const Point2 pad(shape.radius, shape.radius);
          return point_in_rect<double>(shape.center - pad, bounds_) &&
                 point_in_rect<double>(shape.center + pad, bounds_);
        } else {
          return point_in_rect(shape.min, bounds_) && point_in_rect(shape.max, bounds_);
        }
      },
      obstacle.shape);
  if (!inside) throw std::invalid_argument("static obstacle leaves the workspace bounds");
  statics_.push_back(obstacle);
}

void DynamicEnvironment::add_dynamic(const DynamicObstacle& obstacle) {
  const Point2 pad(obstacle.radius, obstacle.radius);
  if (!(obstacle.radius > 0.0) || !(obstacle.speed >= 0.0) || !obstacle.position.allFinite() ||
      !point_in_rect<double>(obstacle.position - pad, bounds_) ||
      !point_in_rect<double>(obstacle.position + pad, bounds_) ||
      !(obstacle.remaining_distance >= 0.0)) {
    throw std::invalid_argument("dynamic obstacle must have positive radius and lie inside the bounds");
  }
  dynamics_.push_back(obstacle);
}

void DynamicEnvironment::step(double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step needs dt > 0");
  for (auto& o : dynamics_) advance(o, dt);
}

void DynamicEnvironment::redraw_leg(DynamicObstacle& o) {
  std::uniform_real_distribution<double> heading(0.0, kTwoPi);
  std::uniform_real_distribution<double> length(0.0, kMaxLegLength);
  o.heading = heading(rng_);
  o.remaining_distance = kMaxLegLength - length(rng_);  // (0, 10]
}

bool DynamicEnvironment::heading_leaves_contact(const DynamicObstacle& o, double heading) const {
  const Point2 u = direction(heading);
  const double lo_x = bounds_.min.x() + o.radius;
  const double hi_x = bounds_.max.x() - o.radius;
  const double lo_y = bounds_.min.y() + o.radius;
  const double hi_y = bounds_.max.y() - o.radius;
  if (o.position.x() <= lo_x && !(u.x() > 0.0)) return false;
  if (o.position.x() >= hi_x && !(u.x() < 0.0)) return false;
  if (o.position.y() <= lo_y && !(u.y() > 0.0)) return false;
  if (o.position.y() >= hi_y && !(u.y() < 0.0)) return false;
  for (const auto& s : statics_) {
    if (contact_with_static(o.position, u, o.radius, s) <= 0.0) return false;
  }
  return true;
}

void DynamicEnvironment::redraw_heading_inward(DynamicObstacle& o) {
  std::uniform_real_distribution<double> heading(0.0, kTwoPi);
  for (int i = 0; i < kMaxHeadingDraws; ++i) {
    o.heading = heading(rng_);
    if (heading_leaves_contact(o, o.heading)) return;
  }
}

double DynamicEnvironment::distance_to_contact(const DynamicObstacle& o) const {
  const Point2 u = direction(o.heading);
  if (!heading_leaves_contact(o, o.heading)) return 0.0;
  double best = kInf;
  for (int axis = 0; axis < 2; ++axis) {
    const double lo = bounds_.min[axis] + o.radius;
    const double hi = bounds_.max[axis] - o.radius;
    if (u[axis] > 0.0) best = std::min(best, (hi - o.position[axis]) / u[axis]);
    if (u[axis] < 0.0) best = std::min(best, (lo - o.position[axis]) / u[axis]);
  }
  for (const auto& s : statics_) {
    best = std::min(best, contact_with_static(o.position, u, o.radius, s));
  }
  return std::max(best, 0.0);
}

void DynamicEnvironment::advance(DynamicObstacle& o, double dt) {
  const auto clamp_inside = [&] {
    for (int axis = 0; axis < 2; ++axis) {
      const double lo = bounds_.min[axis] + o.radius;
      const double hi = bounds_.max[axis] - o.radius;
      double& v = o.position[axis];
      v = std::clamp(v, lo, hi);
      // Snap rounding residue so wall contact is detected exactly.
      if (v - lo < 1e-9) v = lo;
      if (hi - v < 1e-9) v = hi;
    }
  };
  clamp_inside();
  if (o.remaining_distance <= 0.0) redraw_leg(o);
  double travel = o.speed * dt;
  for (int event = 0; event < kMaxEventsPerStep && travel > 0.0; ++event) {
    if (o.remaining_distance <= 0.0) redraw_leg(o);
    const double contact = distance_to_contact(o);
    if (contact <= 0.0) {
      redraw_heading_inward(o);
      continue;
    }
    const double s = std::min({travel, o.remaining_distance, contact});
    o.position += s * direction(o.heading);
    clamp_inside();
    travel -= s;
    o.remaining_distance = std::max(0.0, o.remaining_distance - s);
    if (s == contact) redraw_heading_inward(o);
  }
}

std::vector<Circle> DynamicEnvironment::collision_zones(double t_u) const {
  if (!(t_u > 0.0)) throw std::invalid_argument("collision zones need t_u > 0");
  std::vector<Circle> zones;
  zones.reserve(dynamics_.size());
  for (const auto& o : dynamics_) {
    zones.push_back(Circle{o.position, o.radius + 2.0 * t_u * o.speed});
  }
  return zones;
}

bool DynamicEnvironment::robot_in_collision(const Point2& p) const {
  for (const auto& o : dynamics_) {
    if (point_in_circle(p, o.body())) return true;
  }
  return !point_free_static(p);
}

bool DynamicEnvironment::point_free_static(const Point2& p) const {
  for (const auto& s : statics_) {
    if (point_in_static(p, s)) return false;
  }
  return true;
}

bool DynamicEnvironment::segment_free_static(const Segment2& s) const {
  if (!point_in_rect(s.a, bounds_) || !point_in_rect(s.b, bounds_)) return false;
  for (const auto& o : statics_) {
    if (segment_hits_static(s, o)) return false;
  }
  return true;
}

Point2 DynamicEnvironment::sample_free(Rng& rng) const {
  std::uniform_real_distribution<double> ux(bounds_.min.x(), bounds_.max.x());
  std::uniform_real_distribution<double> uy(bounds_.min.y(), bounds_.max.y());
  for (int i = 0; i < kSampleFreeAttempts; ++i) {
    const Point2 p(ux(rng), uy(rng));
    if (point_free_static(p)) return p;
  }
  throw std::runtime_error("free space sampling exhausted; scenario looks degenerate");
}

}  // namespace smarrt
