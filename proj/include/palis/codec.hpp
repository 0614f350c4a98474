#pragma once

// Encoding of a vector road graph into patch classes plus one chord per
// I-cell.

#include <string>
#include <vector>

#include "palis/geometry.hpp"
#include "palis/patch_grid.hpp"
#include "palis/road_graph.hpp"

namespace palis {

/// Pieces shorter than this never count as a road passing through a patch.
inline constexpr double kMinPieceLength = 0.5;
/// Chords deviating from their traversal by more than this are reported.
inline constexpr double kCurvatureWarning = 2.0;

/// A road: a maximal walk through the graph. Degree-2 vertices are passed
/// through; at junctions the incident edges are paired by straightest
/// continuation, so a four-way crossing yields two roads.
struct RoadPath {
  std::vector<std::uint32_t> vertices;
  bool closed = false;
};

std::vector<RoadPath> road_paths(const RoadGraph& g);

struct Traversal {
  Polyline piece;
  std::size_t road = 0;
};

/// Every road clipped to `rect`, pieces of arc length < 0.5 px discarded.
/// The size of the result is the number of roads passing through the patch.
std::vector<Traversal> traversals_in_patch(const RoadGraph& g, const std::vector<RoadPath>& roads,
                                           const PatchRect& rect);
std::vector<Traversal> traversals_in_patch(const RoadGraph& g, const PatchRect& rect);

PatchClass classify_patch(const std::vector<Traversal>& pieces, const RoadGraph& g, const PatchRect& rect);

/// Segment from the first to the last point of a traversal. Throws
/// InvariantError for a piece with fewer than two points.
LineSegment chord_of_piece(const Polyline& piece);

/// Largest distance from any piece vertex to the chord.
double chord_deviation(const Polyline& piece);

struct EncodeDiagnostic {
  int row = 0;
  int col = 0;
  std::string message;
};

/// Throws InvariantError when p does not divide both dimensions.
PatchGrid encode_graph(const RoadGraph& g, int width, int height, int patch_size = 8,
                       std::vector<EncodeDiagnostic>* diagnostics = nullptr);

}  // namespace palis
