#pragma once

// Planar primitives shared by the simulator and every planner.
// All predicates use closed-set semantics: touching counts as intersecting.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smarrt {

template <typename Scalar>
using Point2T = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
struct Segment2T {
  Point2T<Scalar> a;
  Point2T<Scalar> b;
};

template <typename Scalar>
struct CircleT {
  Point2T<Scalar> center;
  Scalar radius{0};
};

template <typename Scalar>
struct RectT {
  Point2T<Scalar> min;
  Point2T<Scalar> max;

  Scalar width() const { return max.x() - min.x(); }
  Scalar height() const { return max.y() - min.y(); }
};

using Point2 = Point2T<double>;
using Segment2 = Segment2T<double>;
using Circle = CircleT<double>;
using Rect = RectT<double>;

/// Checked construction; rejects NaN and infinities.
inline Point2 make_point(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw std::invalid_argument("point coordinates must be finite");
  }
  return Point2(x, y);
}

inline Circle make_circle(const Point2& center, double radius) {
  if (!center.allFinite() || !(radius >= 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("circle needs a finite center and radius >= 0");
  }
  return Circle{center, radius};
}

inline Rect make_rect(const Point2& lo, const Point2& hi) {
  if (!lo.allFinite() || !hi.allFinite() || lo.x() > hi.x() || lo.y() > hi.y()) {
    throw std::invalid_argument("rect needs finite corners with min <= max");
  }
  return Rect{lo, hi};
}

template <typename Scalar>
Scalar dist(const Point2T<Scalar>& p, const Point2T<Scalar>& q) {
  return (p - q).norm();
}

template <typename Scalar>
Scalar segment_length(const Segment2T<Scalar>& s) {
  return (s.b - s.a).norm();
}

/// Closest point of the closed segment to p.
template <typename Scalar>
Point2T<Scalar> closest_point(const Segment2T<Scalar>& s, const Point2T<Scalar>& p) {
  const Point2T<Scalar> ab = s.b - s.a;
  const Scalar len2 = ab.squaredNorm();
  if (len2 == Scalar(0)) return s.a;
  const Scalar t = std::clamp((p - s.a).dot(ab) / len2, Scalar(0), Scalar(1));
  return s.a + t * ab;
}

template <typename Scalar>
Scalar point_segment_distance(const Point2T<Scalar>& p, const Segment2T<Scalar>& s) {
  return (closest_point(s, p) - p).norm();
}

template <typename Scalar>
bool point_in_circle(const Point2T<Scalar>& p, const CircleT<Scalar>& c) {
  return (p - c.center).squaredNorm() <= c.radius * c.radius;
}

template <typename Scalar>
bool segment_intersects_circle(const Segment2T<Scalar>& s, const CircleT<Scalar>& c) {
  return (closest_point(s, c.center) - c.center).squaredNorm() <= c.radius * c.radius;
}

template <typename Scalar>
bool point_in_rect(const Point2T<Scalar>& p, const RectT<Scalar>& r) {
  return p.x() >= r.min.x() && p.x() <= r.max.x() && p.y() >= r.min.y() && p.y() <= r.max.y();
}

/// Liang-Barsky clip of the segment against the closed rectangle.
template <typename Scalar>
bool segment_intersects_rect(const Segment2T<Scalar>& s, const RectT<Scalar>& r) {
  const Point2T<Scalar> d = s.b - s.a;
  Scalar t0 = 0;
  Scalar t1 = 1;
  const auto clip = [&](Scalar p, Scalar q) {
    if (p == Scalar(0)) return q >= Scalar(0);
    const Scalar t = q / p;
    if (p < Scalar(0)) {
      if (t > t1) return false;
      t0 = std::max(t0, t);
    } else {
      if (t < t0) return false;
      t1 = std::min(t1, t);
    }
    return true;
  };
  return clip(-d.x(), s.a.x() - r.min.x()) && clip(d.x(), r.max.x() - s.a.x()) &&
         clip(-d.y(), s.a.y() - r.min.y()) && clip(d.y(), r.max.y() - s.a.y());
}

/// Point at arc length `step` from `from` toward `to`, or `to` when it is closer.
template <typename Scalar>
Point2T<Scalar> steer(const Point2T<Scalar>& from, const Point2T<Scalar>& to, Scalar step) {
  const Point2T<Scalar> d = to - from;
  const Scalar len = d.norm();
  if (len <= step) return to;
  return from + d * (step / len);
}

}  // namespace smarrt
