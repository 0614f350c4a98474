#include "palis/road_graph.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>
#include <string>
#include <utility>

#include "palis/error.hpp"

namespace palis {

double RoadGraph::total_length() const {
  double total = 0.0;
  for (const Edge& e : edges) total += edge_length(e);
  return total;
}

std::vector<int> RoadGraph::degrees() const {
  std::vector<int> deg(vertices.size(), 0);
  for (const Edge& e : edges) {
    ++deg[e.u];
    ++deg[e.v];
  }
  return deg;
}

std::vector<std::vector<std::uint32_t>> RoadGraph::incidence() const {
  std::vector<std::vector<std::uint32_t>> inc(vertices.size());
  for (std::uint32_t i = 0; i < edges.size(); ++i) {
    inc[edges[i].u].push_back(i);
    inc[edges[i].v].push_back(i);
  }
  return inc;
}

void RoadGraph::validate() const {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!is_finite(vertices[i])) {
      throw InvariantError("vertex " + std::to_string(i) + " is not finite");
    }
  }
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (e.u >= vertices.size() || e.v >= vertices.size()) {
      throw InvariantError("edge " + std::to_string(i) + " references a missing vertex");
    }
    if (e.u == e.v) throw InvariantError("edge " + std::to_string(i) + " is a self-loop");
    if (!seen.insert(std::minmax(e.u, e.v)).second) {
      throw InvariantError("edge " + std::to_string(i) + " duplicates an earlier edge");
    }
  }
}

Adjacency::Adjacency(const RoadGraph& g) : arcs(g.vertex_count()) {
  for (const Edge& e : g.edges) {
    const double len = g.edge_length(e);
    arcs[e.u].push_back({e.v, len});
    arcs[e.v].push_back({e.u, len});
  }
}

std::vector<double> shortest_path_lengths(const Adjacency& adj, std::uint32_t source) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(adj.arcs.size(), kInf);
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const auto& arc : adj.arcs[u]) {
      const double nd = d + arc.length;
      if (nd < dist[arc.to]) {
        dist[arc.to] = nd;
        heap.push({nd, arc.to});
      }
    }
  }
  return dist;
}

}  // namespace palis
