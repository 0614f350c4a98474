#include "palis/geometry.hpp"

#include <algorithm>
#include <array>

#include "palis/error.hpp"

namespace palis {

bool PatchRect::contains(Point p, double tol) const {
  const Point lo = origin();
  const Point hi = max_corner();
  return p.x >= lo.x - tol && p.x <= hi.x + tol && p.y >= lo.y - tol && p.y <= hi.y + tol;
}

bool PatchRect::owns(Point p) const {
  const Point lo = origin();
  const Point hi = max_corner();
  return p.x >= lo.x && p.x < hi.x && p.y >= lo.y && p.y < hi.y;
}

double PatchRect::distance_to(Point p) const { return distance(p, clamp(p)); }

Point PatchRect::clamp(Point p) const {
  const Point lo = origin();
  const Point hi = max_corner();
  return {std::clamp(p.x, lo.x, hi.x), std::clamp(p.y, lo.y, hi.y)};
}

double point_segment_distance(Point q, const LineSegment& l) {
  const Point d = l.direction();
  const double len2 = dot(d, d);
  if (len2 <= kDegenerateLength * kDegenerateLength) return distance(q, l.a);
  const double s = std::clamp(dot(q - l.a, d) / len2, 0.0, 1.0);
  return distance(q, l.a + s * d);
}

std::optional<double> projection_param(Point q, const LineSegment& l) {
  if (l.is_degenerate()) return std::nullopt;
  const Point d = l.direction();
  return dot(q - l.a, d) / dot(d, d);
}

double perpendicular_line_distance(Point q, const LineSegment& l) {
  if (l.is_degenerate()) return distance(q, l.a);
  const Point d = l.direction();
  return std::abs(cross(q - l.a, d)) / norm(d);
}

std::optional<Point> segment_intersection(const LineSegment& l1, const LineSegment& l2) {
  const Point r = l1.direction();
  const Point s = l2.direction();
  const double denom = cross(r, s);
  if (std::abs(denom) < kParallelTolerance) return std::nullopt;
  const double t = cross(l2.a - l1.a, s) / denom;
  return l1.a + t * r;
}

namespace {

int orientation(Point a, Point b, Point c) {
  const double v = cross(b - a, c - a);
  if (v > 0) return 1;
  if (v < 0) return -1;
  return 0;
}

bool on_closed_segment(Point p, const LineSegment& l) {
  return std::min(l.a.x, l.b.x) <= p.x && p.x <= std::max(l.a.x, l.b.x) &&
         std::min(l.a.y, l.b.y) <= p.y && p.y <= std::max(l.a.y, l.b.y);
}

}  // namespace

bool segments_intersect(const LineSegment& l1, const LineSegment& l2) {
  const int o1 = orientation(l1.a, l1.b, l2.a);
  const int o2 = orientation(l1.a, l1.b, l2.b);
  const int o3 = orientation(l2.a, l2.b, l1.a);
  const int o4 = orientation(l2.a, l2.b, l1.b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_closed_segment(l2.a, l1)) return true;
  if (o2 == 0 && on_closed_segment(l2.b, l1)) return true;
  if (o3 == 0 && on_closed_segment(l1.a, l2)) return true;
  if (o4 == 0 && on_closed_segment(l1.b, l2)) return true;
  return false;
}

double angle_difference(const LineSegment& l1, const LineSegment& l2) {
  if (l1.is_degenerate() || l2.is_degenerate()) {
    throw InvariantError("angle_difference: degenerate segment");
  }
  const Point r = l1.direction();
  const Point s = l2.direction();
  // atan2(|cross|, |dot|) folds the angle into [0, pi/2].
  const double rad = std::atan2(std::abs(cross(r, s)), std::abs(dot(r, s)));
  return rad * 180.0 / M_PI;
}

double shape_distance(const LineSegment& l1, const LineSegment& l2) {
  if (segments_intersect(l1, l2)) return 0.0;
  return std::min({point_segment_distance(l1.a, l2), point_segment_distance(l1.b, l2),
                   point_segment_distance(l2.a, l1), point_segment_distance(l2.b, l1)});
}

double arc_length(const Polyline& poly) {
  double total = 0.0;
  for (std::size_t i = 1; i < poly.size(); ++i) total += distance(poly[i - 1], poly[i]);
  return total;
}

namespace {

// Liang-Barsky parametric clip of p0 + t (p1 - p0), t in [0, 1].
std::optional<std::array<double, 2>> clip_parameters(Point p0, Point p1, Point lo, Point hi) {
  const Point d = p1 - p0;
  double t0 = 0.0;
  double t1 = 1.0;
  const std::array<double, 4> p{-d.x, d.x, -d.y, d.y};
  const std::array<double, 4> q{p0.x - lo.x, hi.x - p0.x, p0.y - lo.y, hi.y - p0.y};
  for (int k = 0; k < 4; ++k) {
    if (p[k] == 0.0) {
      if (q[k] < 0.0) return std::nullopt;
      continue;
    }
    const double r = q[k] / p[k];
    if (p[k] < 0.0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
  }
  if (t0 > t1) return std::nullopt;
  return std::array<double, 2>{t0, t1};
}

Point lerp(Point a, Point b, double t) {
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  return a + t * (b - a);
}

}  // namespace

std::vector<Polyline> clip_polyline_to_rect(const Polyline& poly, const PatchRect& rect) {
  std::vector<Polyline> pieces;
  if (poly.size() < 2) return pieces;
  const Point lo = rect.origin();
  const Point hi = rect.max_corner();

  Polyline current;
  auto flush = [&] {
    if (current.size() >= 2 && arc_length(current) > 0.0) pieces.push_back(std::move(current));
    current.clear();
  };

  for (std::size_t i = 1; i < poly.size(); ++i) {
    const Point p0 = poly[i - 1];
    const Point p1 = poly[i];
    const auto clipped = clip_parameters(p0, p1, lo, hi);
    if (!clipped) {
      flush();
      continue;
    }
    const auto [t0, t1] = *clipped;
    const Point enter = lerp(p0, p1, t0);
    const Point leave = lerp(p0, p1, t1);
    if (t0 > 0.0 || current.empty()) {
      flush();
      current.push_back(enter);
    }
    if (!(leave == current.back())) current.push_back(leave);
    if (t1 < 1.0) flush();
  }
  flush();
  return pieces;
}

}  // namespace palis
