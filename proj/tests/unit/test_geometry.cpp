#include "smarrt/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace smarrt;

namespace {

Segment2 seg(double ax, double ay, double bx, double by) { return {Point2(ax, ay), Point2(bx, by)}; }

// Brute-force: sample the segment densely and look for a point within r + 1e-9.
bool sampled_hit(const Segment2& s, const Circle& c) {
  constexpr int kSamples = 10'000;
  for (int i = 0; i < kSamples; ++i) {
    const double t = static_cast<double>(i) / (kSamples - 1);
    const Point2 p = s.a + t * (s.b - s.a);
    if ((p - c.center).norm() <= c.radius + 1e-9) return true;
  }
  return false;
}

}  // namespace

TEST(Dist, ThreeFourFive) { EXPECT_DOUBLE_EQ(dist(Point2(0, 0), Point2(3, 4)), 5.0); }

TEST(Dist, Identity) { EXPECT_DOUBLE_EQ(dist(Point2(1, 1), Point2(1, 1)), 0.0); }

TEST(Dist, StartToGoal) { EXPECT_NEAR(dist(Point2(2, 30), Point2(30, 2)), 28.0 * std::sqrt(2.0), 1e-12); }

TEST(Dist, TriangleInequalityAndSymmetry) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 10'000; ++i) {
    const Point2 a(u(rng), u(rng)), b(u(rng), u(rng)), c(u(rng), u(rng));
    EXPECT_LE(dist(a, c), dist(a, b) + dist(b, c) + 1e-9);
    EXPECT_EQ(dist(a, b), dist(b, a));
  }
}

TEST(MakePoint, RejectsNonFinite) {
  EXPECT_THROW(make_point(std::nan(""), 0.0), std::invalid_argument);
  EXPECT_THROW(make_point(0.0, std::numeric_limits<double>::infinity()), std::invalid_argument);
  EXPECT_NO_THROW(make_point(1.0, 2.0));
}

TEST(MakeCircle, RejectsNegativeRadius) {
  EXPECT_THROW(make_circle(Point2(0, 0), -1.0), std::invalid_argument);
  EXPECT_NO_THROW(make_circle(Point2(0, 0), 0.0));
}

TEST(MakeRect, RejectsInvertedCorners) {
  EXPECT_THROW(make_rect(Point2(1, 0), Point2(0, 1)), std::invalid_argument);
  EXPECT_NO_THROW(make_rect(Point2(0, 0), Point2(0, 0)));
}

TEST(SegmentCircle, Examples) {
  EXPECT_FALSE(segment_intersects_circle(seg(0, 0, 4, 0), Circle{Point2(2, 2), 1.0}));
  EXPECT_TRUE(segment_intersects_circle(seg(0, 0, 4, 0), Circle{Point2(2, 0.5), 1.0}));
  EXPECT_TRUE(segment_intersects_circle(seg(0, 0, 0, 0), Circle{Point2(0.5, 0), 1.0}));
}

TEST(SegmentCircle, TangencyCounts) {
  EXPECT_TRUE(segment_intersects_circle(seg(0, 0, 4, 0), Circle{Point2(2, 1), 1.0}));
  EXPECT_TRUE(segment_intersects_circle(seg(0, 0, 4, 0), Circle{Point2(5, 0), 1.0}));
}

TEST(SegmentCircle, MatchesDenseSamplingOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::uniform_real_distribution<double> ur(0.0, 5.0);
  int hits = 0;
  for (int i = 0; i < 2'000; ++i) {
    const Segment2 s = seg(u(rng), u(rng), u(rng), u(rng));
    const Circle c{Point2(u(rng), u(rng)), ur(rng)};
    const bool exact = segment_intersects_circle(s, c);
    const bool sampled = sampled_hit(s, c);
    // Sampling can only miss grazing contacts by up to half a sample spacing.
    if (exact != sampled) {
      const double gap = point_segment_distance(c.center, s) - c.radius;
      EXPECT_TRUE(exact);
      EXPECT_LE(std::abs(gap), segment_length(s) / 9'999.0 + 1e-9);
    }
    hits += exact;
  }
  EXPECT_GT(hits, 100);
  EXPECT_LT(hits, 1'900);
}

TEST(PointCircle, Examples) {
  EXPECT_TRUE(point_in_circle(Point2(0, 0), Circle{Point2(0, 0), 0.0}));
  EXPECT_TRUE(point_in_circle(Point2(3, 4), Circle{Point2(0, 0), 5.0}));
  EXPECT_FALSE(point_in_circle(Point2(3, 4), Circle{Point2(0, 0), 4.9}));
}

TEST(SegmentRect, Examples) {
  const Rect r{Point2(0, 0), Point2(1, 1)};
  EXPECT_TRUE(segment_intersects_rect(seg(-1, 0.5, 2, 0.5), r));
  EXPECT_FALSE(segment_intersects_rect(seg(-1, 2, 2, 2), r));
  EXPECT_TRUE(segment_intersects_rect(seg(0.2, 0.2, 0.8, 0.8), r));
}

TEST(SegmentRect, ClosedBoundary) {
  const Rect r{Point2(0, 0), Point2(1, 1)};
  EXPECT_TRUE(segment_intersects_rect(seg(-1, 1, 2, 1), r));  // runs along the top edge
  EXPECT_TRUE(segment_intersects_rect(seg(1, 1, 2, 2), r));   // touches a corner
  EXPECT_FALSE(segment_intersects_rect(seg(1.0001, 0, 1.0001, 1), r));
  EXPECT_TRUE(segment_intersects_rect(seg(0.5, 0.5, 0.5, 0.5), r));
}

TEST(SegmentRect, MatchesDenseSamplingOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 1'000; ++i) {
    Point2 lo(u(rng), u(rng)), hi(u(rng), u(rng));
    const Rect r{lo.cwiseMin(hi), lo.cwiseMax(hi)};
    const Segment2 s = seg(u(rng), u(rng), u(rng), u(rng));
    bool sampled = false;
    for (int k = 0; k < 10'000 && !sampled; ++k) {
      const Point2 p = s.a + (k / 9'999.0) * (s.b - s.a);
      sampled = point_in_rect(p, r);
    }
    if (sampled) EXPECT_TRUE(segment_intersects_rect(s, r));
  }
}

TEST(Predicates, TranslationInvariant) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_real_distribution<double> shift(-1000.0, 1000.0);
  for (int i = 0; i < 5'000; ++i) {
    const Segment2 s = seg(u(rng), u(rng), u(rng), u(rng));
    // Radii and offsets on a 1/8 grid keep every quantity exactly representable after shifting.
    const Circle c{Point2(std::round(u(rng) * 8) / 8, std::round(u(rng) * 8) / 8), std::round(u(rng) * 8) / 8 + 5};
    const Point2 lo(std::round(u(rng) * 8) / 8, std::round(u(rng) * 8) / 8);
    const Rect r{lo, lo + Point2(1.5, 2.25)};
    const Point2 d(std::round(shift(rng)), std::round(shift(rng)));
    const Segment2 s2{s.a + d, s.b + d};
    const Circle c2{c.center + d, c.radius};
    const Rect r2{r.min + d, r.max + d};
    const double gap = point_segment_distance(c.center, s) - c.radius;
    if (std::abs(gap) > 1e-9) EXPECT_EQ(segment_intersects_circle(s, c), segment_intersects_circle(s2, c2));
    if (std::abs(dist(s.a, c.center) - c.radius) > 1e-9) EXPECT_EQ(point_in_circle(s.a, c), point_in_circle(s2.a, c2));
    EXPECT_EQ(point_in_rect(s.a, r), point_in_rect(s2.a, r2));
    EXPECT_NEAR(dist(s.a, s.b), dist(s2.a, s2.b), 1e-9);
  }
}

TEST(Steer, Examples) {
  EXPECT_TRUE(steer(Point2(0, 0), Point2(10, 0), 2.0).isApprox(Point2(2, 0)));
  EXPECT_EQ(steer(Point2(0, 0), Point2(1, 0), 2.0), Point2(1, 0));
  EXPECT_TRUE(steer(Point2(0, 0), Point2(3, 4), 2.5).isApprox(Point2(1.5, 2)));
  EXPECT_EQ(steer(Point2(1, 1), Point2(1, 1), 2.0), Point2(1, 1));
}

TEST(Geometry, FloatInstantiation) {
  const Point2T<float> a(0.f, 0.f), b(3.f, 4.f);
  EXPECT_FLOAT_EQ(dist(a, b), 5.f);
  EXPECT_TRUE(segment_intersects_circle(Segment2T<float>{a, b}, CircleT<float>{Point2T<float>(3.f, 0.f), 2.5f}));
}
