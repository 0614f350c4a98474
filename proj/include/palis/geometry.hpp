#pragma once

// Exact 2D primitives in the image frame: origin at the top-left corner,
// y grows downward, pixel (i, j) has its center at (j + 0.5, i + 0.5).

#include <cmath>
#include <optional>
#include <vector>

namespace palis {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend constexpr Point operator*(Point a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Point a, Point b) = default;
};

constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }
inline bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Threshold below which a segment counts as degenerate.
inline constexpr double kDegenerateLength = 1e-9;
/// |cross| threshold for treating two directions as parallel.
inline constexpr double kParallelTolerance = 1e-9;

struct LineSegment {
  Point a;
  Point b;

  Point direction() const { return b - a; }
  double length() const { return distance(a, b); }
  bool is_degenerate() const { return length() <= kDegenerateLength; }
  LineSegment reversed() const { return {b, a}; }
  Point midpoint() const { return 0.5 * (a + b); }

  friend constexpr bool operator==(const LineSegment&, const LineSegment&) = default;
};

/// One p x p patch of the image lattice.
struct PatchRect {
  int row = 0;
  int col = 0;
  int size = 8;

  Point origin() const { return {static_cast<double>(col * size), static_cast<double>(row * size)}; }
  Point max_corner() const { return {static_cast<double>((col + 1) * size), static_cast<double>((row + 1) * size)}; }
  Point center() const { return 0.5 * (origin() + max_corner()); }

  /// Closed-rectangle membership, expanded by `tol`.
  bool contains(Point p, double tol = 0.0) const;
  /// Half-open membership [x0, x0+p) x [y0, y0+p); each point of the plane
  /// belongs to exactly one patch.
  bool owns(Point p) const;
  /// Euclidean distance from `p` to the closed rectangle (0 inside).
  double distance_to(Point p) const;
  Point clamp(Point p) const;
};

double point_segment_distance(Point q, const LineSegment& l);

/// Foot-of-perpendicular parameter s = ((q-a).(b-a)) / |b-a|^2.
/// Empty for a degenerate segment.
std::optional<double> projection_param(Point q, const LineSegment& l);

/// Distance from `q` to the infinite supporting line of `l`; falls back to
/// the point distance |q - a| when `l` is degenerate.
double perpendicular_line_distance(Point q, const LineSegment& l);

/// Intersection of the two supporting lines; empty when parallel.
std::optional<Point> segment_intersection(const LineSegment& l1, const LineSegment& l2);

/// True when the two closed segments share at least one point.
bool segments_intersect(const LineSegment& l1, const LineSegment& l2);

/// Undirected acute angle between the supporting lines, in degrees [0, 90].
/// Throws InvariantError on a degenerate argument.
double angle_difference(const LineSegment& l1, const LineSegment& l2);

/// 0 if the closed segments intersect, otherwise the smallest of the four
/// endpoint-to-opposite-segment distances.
double shape_distance(const LineSegment& l1, const LineSegment& l2);

using Polyline = std::vector<Point>;

double arc_length(const Polyline& poly);

/// Maximal connected sub-polylines of `poly` inside the closed rectangle,
/// in traversal order. Boundary crossings become explicit vertices.
std::vector<Polyline> clip_polyline_to_rect(const Polyline& poly, const PatchRect& rect);

}  // namespace palis
