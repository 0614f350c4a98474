#pragma once

// Graph-quality scores: APLS (shortest-path length agreement) and TOPO
// (marble/hole matching on geodesic neighborhoods of seed locations).

#include <optional>
#include <vector>

#include "palis/road_graph.hpp"

namespace palis {

struct AplsParams {
  double control_point_spacing = 16.0;
  double snap_radius = 8.0;

  void validate() const;
};

enum class MarbleMatching { Greedy, MaxCardinality };

struct TopoParams {
  double seed_interval = 16.0;
  double match_radius = 8.0;
  double propagation_radius = 300.0;
  double marble_interval = 5.0;
  MarbleMatching matching = MarbleMatching::Greedy;

  void validate() const;
};

struct TopoScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Splits every edge into ceil(length / spacing) equal sub-edges.
RoadGraph densify(const RoadGraph& g, double spacing);

struct AplsBreakdown {
  double gt_to_prop = 0.0;
  double prop_to_gt = 0.0;
  double score = 0.0;
};

/// Symmetric APLS in [0, 1]. Throws UsageError on an empty ground truth;
/// an empty proposal scores 0.
AplsBreakdown apls_breakdown(const RoadGraph& gt, const RoadGraph& prop, const AplsParams& params = {});
double apls(const RoadGraph& gt, const RoadGraph& prop, const AplsParams& params = {});

/// A location on a graph: `offset` pixels from edges[edge].u toward .v.
struct PointOnEdge {
  std::uint32_t edge = 0;
  double offset = 0.0;
};

struct GraphProjection {
  PointOnEdge where;
  Point position;
  double distance;
};

/// Closest point on any edge within max_distance (ties: lowest edge index).
std::optional<GraphProjection> nearest_point_on_graph(const RoadGraph& g, Point p, double max_distance);

/// Points at geodesic distances interval, 2 interval, ... (and the origin)
/// along every path from `origin`, up to `radius`.
std::vector<Point> geodesic_marbles(const RoadGraph& g, const PointOnEdge& origin, double interval, double radius);

/// Seed locations: every vertex with an incident edge, plus the interior
/// subdivision points of densify(g, interval).
std::vector<PointOnEdge> seed_locations(const RoadGraph& g, double interval);

struct TopoSeedRecord {
  Point seed;
  bool matched = false;
  std::size_t holes = 0;
  std::size_t marbles = 0;
  std::size_t matches = 0;
};

/// Throws UsageError on an empty ground truth.
TopoScore topo(const RoadGraph& gt, const RoadGraph& prop, const TopoParams& params = {},
               std::vector<TopoSeedRecord>* per_seed = nullptr);

/// Greedy one-to-one matching by ascending distance within `radius`.
std::size_t greedy_match_count(const std::vector<Point>& marbles, const std::vector<Point>& holes, double radius);
/// Maximum-cardinality one-to-one matching within `radius`.
std::size_t max_match_count(const std::vector<Point>& marbles, const std::vector<Point>& holes, double radius);

}  // namespace palis
