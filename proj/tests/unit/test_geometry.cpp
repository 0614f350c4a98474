#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "palis/error.hpp"
#include "palis/geometry.hpp"

using namespace palis;

namespace {

const LineSegment kX{{0, 0}, {2, 0}};

}  // namespace

TEST(PointSegmentDistance, Examples) {
  EXPECT_DOUBLE_EQ(point_segment_distance({1, 0}, kX), 0.0);
  EXPECT_DOUBLE_EQ(point_segment_distance({0, 1}, kX), 1.0);
  EXPECT_NEAR(point_segment_distance({3, 1}, kX), std::sqrt(2.0), 1e-15);
}

TEST(PointSegmentDistance, MatchesSampledScan) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int k = 0; k < 50; ++k) {
    const LineSegment l{{u(rng), u(rng)}, {u(rng), u(rng)}};
    const Point q{u(rng), u(rng)};
    // Sampling overestimates by at most half a sample spacing.
    EXPECT_NEAR(point_segment_distance(q, l), oracle::sampled_segment_distance(q, l), l.length() * 1e-5);
  }
}

TEST(ProjectionParam, Examples) {
  EXPECT_DOUBLE_EQ(*projection_param({1, 5}, kX), 0.5);
  EXPECT_DOUBLE_EQ(*projection_param({-1, 0}, kX), -0.5);
  EXPECT_DOUBLE_EQ(*projection_param({3, 2}, kX), 1.5);
  EXPECT_FALSE(projection_param({1, 1}, {{3, 3}, {3, 3}}).has_value());
}

TEST(PerpendicularLineDistance, Examples) {
  EXPECT_DOUBLE_EQ(perpendicular_line_distance({1, 3}, kX), 3.0);
  EXPECT_DOUBLE_EQ(perpendicular_line_distance({5, 0}, kX), 0.0);
  const LineSegment diag{{0, 1}, {1, 0}};
  EXPECT_NEAR(perpendicular_line_distance({0, 0}, diag), oracle::scanned_line_distance({0, 0}, diag), 1e-9);
  EXPECT_NEAR(perpendicular_line_distance({0, 0}, diag), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(PerpendicularLineDistance, DegenerateFallsBackToPointDistance) {
  EXPECT_DOUBLE_EQ(perpendicular_line_distance({3, 4}, {{0, 0}, {0, 0}}), 5.0);
}

TEST(SegmentIntersection, Examples) {
  const auto p = segment_intersection({{0, 0}, {2, 2}}, {{0, 2}, {2, 0}});
  ASSERT_TRUE(p);
  EXPECT_NEAR(p->x, 1.0, 1e-15);
  EXPECT_NEAR(p->y, 1.0, 1e-15);
  EXPECT_FALSE(segment_intersection({{0, 0}, {1, 0}}, {{0, 1}, {1, 1}}));

  const LineSegment l1{{0, 0}, {4, 0}};
  const LineSegment l2{{1, -1}, {2, 3}};
  const auto q = segment_intersection(l1, l2);
  const Point r = oracle::solve_line_intersection(l1, l2);
  ASSERT_TRUE(q);
  EXPECT_NEAR(q->x, r.x, 1e-12);
  EXPECT_NEAR(q->y, r.y, 1e-12);
  EXPECT_NEAR(q->x, 1.25, 1e-12);
}

TEST(SegmentIntersection, RandomMatchesEliminationSolver) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int k = 0; k < 100; ++k) {
    const LineSegment l1{{u(rng), u(rng)}, {u(rng), u(rng)}};
    const LineSegment l2{{u(rng), u(rng)}, {u(rng), u(rng)}};
    const auto q = segment_intersection(l1, l2);
    if (!q) continue;
    const Point r = oracle::solve_line_intersection(l1, l2);
    if (std::abs(r.x) > 1e4 || std::abs(r.y) > 1e4) continue;  // near parallel
    EXPECT_NEAR(q->x, r.x, 1e-7 * (1 + std::abs(r.x)));
    EXPECT_NEAR(q->y, r.y, 1e-7 * (1 + std::abs(r.y)));
  }
}

TEST(AngleDifference, Examples) {
  EXPECT_NEAR(angle_difference({{0, 0}, {1, 0}}, {{5, 5}, {6, 5}}), 0.0, 1e-12);
  EXPECT_NEAR(angle_difference({{0, 0}, {1, 0}}, {{0, 0}, {0, 1}}), 90.0, 1e-12);
  EXPECT_NEAR(angle_difference({{0, 0}, {1, 0}}, {{1, 0}, {0, 0}}), 0.0, 1e-12);
  EXPECT_NEAR(angle_difference({{0, 0}, {1, 0}}, {{0, 0}, {1, 1}}), 45.0, 1e-12);
  EXPECT_THROW(angle_difference({{0, 0}, {0, 0}}, {{0, 0}, {1, 0}}), InvariantError);
}

TEST(ShapeDistance, Examples) {
  EXPECT_DOUBLE_EQ(shape_distance({{0, 0}, {2, 2}}, {{0, 2}, {2, 0}}), 0.0);
  EXPECT_DOUBLE_EQ(shape_distance({{0, 0}, {1, 0}}, {{3, 0}, {4, 0}}), 2.0);
  const LineSegment l1{{0, 0}, {2, 0}};
  const LineSegment l2{{0, 1}, {2, 3}};
  EXPECT_NEAR(shape_distance(l1, l2), oracle::scanned_segment_gap(l1, l2), 1e-3);
  EXPECT_NEAR(shape_distance(l1, l2), 1.0, 1e-12);
}

TEST(ClipPolyline, Examples) {
  const PatchRect rect{0, 0, 8};
  const auto pieces = clip_polyline_to_rect({{-4, 4}, {12, 4}}, rect);
  ASSERT_EQ(pieces.size(), 1u);
  ASSERT_EQ(pieces[0].size(), 2u);
  EXPECT_EQ(pieces[0].front(), (Point{0, 4}));
  EXPECT_EQ(pieces[0].back(), (Point{8, 4}));
  EXPECT_TRUE(clip_polyline_to_rect({{-4, -4}, {-1, 20}}, rect).empty());
}

TEST(ClipPolyline, VShapeMatchesDenseRunCount) {
  const PatchRect rect{0, 0, 8};
  const Polyline v{{2, -3}, {4, 6}, {6, -3}};
  const auto pieces = clip_polyline_to_rect(v, rect);
  // Walk the polyline at 0.01 px and count maximal inside runs.
  int runs = 0;
  bool inside = false;
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    const double len = distance(v[k], v[k + 1]);
    const int n = static_cast<int>(len / 0.01);
    for (int s = 0; s <= n; ++s) {
      const Point p = v[k] + (static_cast<double>(s) / n) * (v[k + 1] - v[k]);
      const bool in = rect.contains(p);
      if (in && !inside) ++runs;
      inside = in;
    }
  }
  EXPECT_EQ(runs, 1);  // the V dips in once and the vertex is inside
  EXPECT_EQ(static_cast<int>(pieces.size()), runs);

  const Polyline w{{1, -2}, {2, 3}, {3, -2}, {5, -2}, {6, 3}, {7, -2}};
  int w_runs = 0;
  inside = false;
  for (std::size_t k = 0; k + 1 < w.size(); ++k) {
    const int n = 2000;
    for (int s = 0; s <= n; ++s) {
      const Point p = w[k] + (static_cast<double>(s) / n) * (w[k + 1] - w[k]);
      const bool in = rect.contains(p);
      if (in && !inside) ++w_runs;
      inside = in;
    }
  }
  EXPECT_EQ(w_runs, 2);
  EXPECT_EQ(clip_polyline_to_rect(w, rect).size(), 2u);
}

TEST(PatchRect, HalfOpenOwnership) {
  const PatchRect a{0, 0, 8};
  const PatchRect b{0, 1, 8};
  EXPECT_TRUE(a.owns({0, 0}));
  EXPECT_FALSE(a.owns({8, 4}));
  EXPECT_TRUE(b.owns({8, 4}));
  EXPECT_TRUE(a.contains({8, 4}));
  EXPECT_DOUBLE_EQ(a.distance_to({11, 4}), 3.0);
  EXPECT_EQ(a.clamp({-1, 9}), (Point{0, 8}));
}

TEST(ArcLength, Sum) { EXPECT_DOUBLE_EQ(arc_length({{0, 0}, {3, 4}, {3, 10}}), 11.0); }
