#pragma once

// Road-graph reconstruction from a PatchGrid:
//   I-cells   adjacent chords sharing an endpoint are merged into one vertex;
//   X-cells   neighbor chords are extended to a common intersection vertex;
//   T-cells   aligned chords on opposite sides are joined straight across,
//             without a shared vertex, so crossing roads stay separate.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "palis/patch_grid.hpp"
#include "palis/road_graph.hpp"

namespace palis {

struct ReconstructParams {
  double tau_d = 2.0;   // px
  double tau_a = 15.0;  // degrees
  int neighbor_radius = 1;

  void validate() const;
};

struct CellIndex {
  int row = 0;
  int col = 0;

  friend constexpr bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// I-cells within Chebyshev distance `radius` of (row, col), excluding the
/// cell itself, in row-major order.
std::vector<CellIndex> neighbors(const PatchGrid& grid, int row, int col, int radius = 1);

enum class End : int { A = 0, B = 1 };

inline Point endpoint(const LineSegment& l, End e) { return e == End::A ? l.a : l.b; }

/// Endpoint of `l` nearer to `target` by point-to-segment distance (A on ties).
End nearer_endpoint(const LineSegment& l, const LineSegment& target);
/// Endpoint of `l` nearer to a point (A on ties).
End nearer_endpoint(const LineSegment& l, Point target);

struct EndpointJoin {
  End end_i;
  End end_j;
  double mean_distance;
};

/// Joins two chords when the mean of d(e_j, l_i) and d(e_i, l_j) is at most
/// tau_d, where e_i is the endpoint of l_i nearer to l_j and vice versa.
std::optional<EndpointJoin> connect_I(const LineSegment& l_i, const LineSegment& l_j, double tau_d);

struct JunctionLink {
  std::size_t segment;  // index into the neighbor list
  End end;
};

struct XResolution {
  Point intersection;
  std::vector<JunctionLink> links;
  /// True when no pairwise intersection fell inside the cell and the
  /// centroid of the facing endpoints was used instead.
  bool fallback = false;
};

/// Empty when fewer than two neighbor segments are available.
std::optional<XResolution> resolve_X(const PatchRect& cell, std::span<const LineSegment> neighbor_segments);

struct CrossingLink {
  std::size_t m;
  std::size_t n;
  End end_m;
  End end_n;
  double offset;
};

/// Lateral offset between two roughly collinear chords: mean distance of
/// each facing endpoint from the other chord's supporting line.
double lateral_offset(const LineSegment& l_m, End end_m, const LineSegment& l_n, End end_n);

/// One-to-one pairing of neighbor chords across a T-cell: both facing
/// endpoints within tau_d of the cell, the gap continuing both chords
/// forward, lateral offset <= tau_d and angle <= tau_a. Accepted greedily
/// by ascending offset; each endpoint joins at most one partner.
std::vector<CrossingLink> resolve_T(const PatchRect& cell, std::span<const LineSegment> neighbor_segments,
                                    double tau_d, double tau_a);

RoadGraph reconstruct_graph(const PatchGrid& grid, const ReconstructParams& params = {},
                            std::vector<std::string>* diagnostics = nullptr);

}  // namespace palis
