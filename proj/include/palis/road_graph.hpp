#pragma once

#include <cstdint>
#include <vector>

#include "palis/geometry.hpp"

namespace palis {

struct Edge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;

  friend constexpr bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected planar graph with straight edges between vertex positions.
/// Invariants (checked by validate()): finite vertices, edge indices in
/// range, no self-loops, no duplicate edges.
struct RoadGraph {
  std::vector<Point> vertices;
  std::vector<Edge> edges;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t edge_count() const { return edges.size(); }
  bool empty() const { return vertices.empty(); }

  std::uint32_t add_vertex(Point p) {
    vertices.push_back(p);
    return static_cast<std::uint32_t>(vertices.size() - 1);
  }
  void add_edge(std::uint32_t u, std::uint32_t v) { edges.push_back({u, v}); }

  LineSegment edge_segment(const Edge& e) const { return {vertices[e.u], vertices[e.v]}; }
  double edge_length(const Edge& e) const { return distance(vertices[e.u], vertices[e.v]); }
  double total_length() const;

  std::vector<int> degrees() const;
  /// Incident edge indices per vertex.
  std::vector<std::vector<std::uint32_t>> incidence() const;

  /// Throws InvariantError naming the first violation.
  void validate() const;

  friend bool operator==(const RoadGraph&, const RoadGraph&) = default;
};

/// Weighted adjacency (neighbor, edge length) for shortest-path searches.
struct Adjacency {
  struct Arc {
    std::uint32_t to;
    double length;
  };
  std::vector<std::vector<Arc>> arcs;

  explicit Adjacency(const RoadGraph& g);
};

/// Single-source Dijkstra over the straight-edge lengths.
std::vector<double> shortest_path_lengths(const Adjacency& adj, std::uint32_t source);

}  // namespace palis
