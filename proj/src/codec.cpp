#include "palis/codec.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

#include "palis/error.hpp"
#include "palis/parallel.hpp"

namespace palis {

namespace {

constexpr std::int64_t kNoPartner = -1;

std::uint32_t other_end(const Edge& e, std::uint32_t v) { return e.u == v ? e.v : e.u; }

Point unit(Point d) {
  const double n = norm(d);
  return n > 0.0 ? (1.0 / n) * d : Point{};
}

// partner[v] maps the position of an edge in incidence[v] to its paired edge.
struct Pairing {
  std::vector<std::vector<std::uint32_t>> incidence;
  std::vector<std::vector<std::int64_t>> partner;

  std::int64_t partner_of(std::uint32_t v, std::uint32_t edge) const {
    const auto& inc = incidence[v];
    for (std::size_t k = 0; k < inc.size(); ++k) {
      if (inc[k] == edge) return partner[v][k];
    }
    return kNoPartner;
  }
};

Pairing pair_edges(const RoadGraph& g) {
  Pairing pairing;
  pairing.incidence = g.incidence();
  pairing.partner.resize(g.vertex_count());
  for (std::uint32_t v = 0; v < g.vertex_count(); ++v) {
    const auto& inc = pairing.incidence[v];
    auto& partner = pairing.partner[v];
    partner.assign(inc.size(), kNoPartner);
    if (inc.size() < 2) continue;
    if (inc.size() == 2) {
      partner[0] = inc[1];
      partner[1] = inc[0];
      continue;
    }
    // Greedy: straightest continuation first (most negative dot product of
    // the outgoing unit directions), ties by position.
    std::vector<Point> dirs;
    for (std::uint32_t e : inc) dirs.push_back(unit(g.vertices[other_end(g.edges[e], v)] - g.vertices[v]));
    std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
    for (std::size_t i = 0; i < inc.size(); ++i) {
      for (std::size_t j = i + 1; j < inc.size(); ++j) candidates.emplace_back(dot(dirs[i], dirs[j]), i, j);
    }
    std::sort(candidates.begin(), candidates.end());
    for (const auto& [score, i, j] : candidates) {
      if (partner[i] != kNoPartner || partner[j] != kNoPartner) continue;
      partner[i] = inc[j];
      partner[j] = inc[i];
    }
  }
  return pairing;
}

}  // namespace

std::vector<RoadPath> road_paths(const RoadGraph& g) {
  const Pairing pairing = pair_edges(g);
  std::vector<bool> visited(g.edge_count(), false);
  std::vector<RoadPath> roads;

  for (std::uint32_t e0 = 0; e0 < g.edge_count(); ++e0) {
    if (visited[e0]) continue;
    // Walk backwards from e0's u-end to the start of its road.
    std::uint32_t edge = e0;
    std::uint32_t tail = g.edges[e0].u;
    bool closed = false;
    while (true) {
      const std::int64_t p = pairing.partner_of(tail, edge);
      if (p == kNoPartner) break;
      const auto next = static_cast<std::uint32_t>(p);
      if (next == e0) {
        closed = true;
        break;
      }
      tail = other_end(g.edges[next], tail);
      edge = next;
    }
    if (closed) {
      edge = e0;
      tail = g.edges[e0].u;
    }

    RoadPath road;
    road.closed = closed;
    road.vertices.push_back(tail);
    const std::uint32_t start_edge = edge;
    while (true) {
      visited[edge] = true;
      const std::uint32_t head = other_end(g.edges[edge], tail);
      road.vertices.push_back(head);
      const std::int64_t p = pairing.partner_of(head, edge);
      if (p == kNoPartner || static_cast<std::uint32_t>(p) == start_edge) break;
      tail = head;
      edge = static_cast<std::uint32_t>(p);
    }
    roads.push_back(std::move(road));
  }
  return roads;
}

namespace {

bool on_single_border(const Polyline& piece, const PatchRect& rect) {
  const Point lo = rect.origin();
  const Point hi = rect.max_corner();
  auto all = [&](auto pred) { return std::all_of(piece.begin(), piece.end(), pred); };
  return all([&](Point p) { return p.x == lo.x; }) || all([&](Point p) { return p.x == hi.x; }) ||
         all([&](Point p) { return p.y == lo.y; }) || all([&](Point p) { return p.y == hi.y; });
}

// A piece running along a patch border belongs to the patch on the left of
// its travel direction (screen-left in the y-down frame).
bool border_piece_belongs(const Polyline& piece, const PatchRect& rect) {
  const Point d = piece.back() - piece.front();
  const Point left = unit(Point{d.y, -d.x});
  const Point probe = 0.5 * (piece.front() + piece.back()) + 1e-6 * left;
  const Point lo = rect.origin();
  const Point hi = rect.max_corner();
  return probe.x > lo.x && probe.x < hi.x && probe.y > lo.y && probe.y < hi.y;
}

}  // namespace

std::vector<Traversal> traversals_in_patch(const RoadGraph& g, const std::vector<RoadPath>& roads,
                                           const PatchRect& rect) {
  std::vector<Traversal> out;
  const Point lo = rect.origin();
  const Point hi = rect.max_corner();
  for (std::size_t r = 0; r < roads.size(); ++r) {
    const RoadPath& road = roads[r];
    Polyline poly;
    poly.reserve(road.vertices.size());
    double min_x = std::numeric_limits<double>::infinity();
    double min_y = min_x;
    double max_x = -min_x;
    double max_y = -min_x;
    for (std::uint32_t v : road.vertices) {
      const Point p = g.vertices[v];
      poly.push_back(p);
      min_x = std::min(min_x, p.x);
      min_y = std::min(min_y, p.y);
      max_x = std::max(max_x, p.x);
      max_y = std::max(max_y, p.y);
    }
    if (max_x < lo.x || min_x > hi.x || max_y < lo.y || min_y > hi.y) continue;
    for (Polyline& piece : clip_polyline_to_rect(poly, rect)) {
      if (arc_length(piece) < kMinPieceLength) continue;
      if (on_single_border(piece, rect) && !border_piece_belongs(piece, rect)) continue;
      out.push_back({std::move(piece), r});
    }
  }
  return out;
}

std::vector<Traversal> traversals_in_patch(const RoadGraph& g, const PatchRect& rect) {
  return traversals_in_patch(g, road_paths(g), rect);
}

PatchClass classify_patch(const std::vector<Traversal>& pieces, const RoadGraph& g, const PatchRect& rect) {
  if (pieces.empty()) return PatchClass::Background;
  if (pieces.size() == 1) return PatchClass::I;
  const std::vector<int> deg = g.degrees();
  for (std::uint32_t v = 0; v < g.vertex_count(); ++v) {
    const Point p = g.vertices[v];
    if (!rect.owns(p)) continue;
    if (deg[v] >= 3) return PatchClass::X;
    int sharing = 0;
    for (const Traversal& t : pieces) {
      if (std::find(t.piece.begin(), t.piece.end(), p) != t.piece.end()) ++sharing;
    }
    if (sharing >= 2) return PatchClass::X;
  }
  return PatchClass::T;
}

LineSegment chord_of_piece(const Polyline& piece) {
  if (piece.size() < 2) throw InvariantError("chord_of_piece: piece needs at least two points");
  return {piece.front(), piece.back()};
}

double chord_deviation(const Polyline& piece) {
  if (piece.size() < 2) return 0.0;
  const LineSegment chord = chord_of_piece(piece);
  double worst = 0.0;
  for (Point p : piece) worst = std::max(worst, point_segment_distance(p, chord));
  return worst;
}

PatchGrid encode_graph(const RoadGraph& g, int width, int height, int patch_size,
                       std::vector<EncodeDiagnostic>* diagnostics) {
  g.validate();
  PatchGrid grid(width, height, patch_size);
  const std::vector<RoadPath> roads = road_paths(g);
  std::vector<double> deviation(grid.cell_count(), 0.0);

  parallel_for(grid.cell_count(), [&](std::size_t idx) {
    const int row = static_cast<int>(idx) / grid.cols();
    const int col = static_cast<int>(idx) % grid.cols();
    const PatchRect rect = grid.rect(row, col);
    const std::vector<Traversal> pieces = traversals_in_patch(g, roads, rect);
    const PatchClass cls = classify_patch(pieces, g, rect);
    switch (cls) {
      case PatchClass::Background:
        break;
      case PatchClass::I:
        grid.set_segment(row, col, chord_of_piece(pieces.front().piece));
        deviation[idx] = chord_deviation(pieces.front().piece);
        break;
      case PatchClass::X:
      case PatchClass::T:
        grid.set_junction(row, col, cls);
        break;
    }
  });

  if (diagnostics) {
    for (std::size_t idx = 0; idx < deviation.size(); ++idx) {
      if (deviation[idx] <= kCurvatureWarning) continue;
      const int row = static_cast<int>(idx) / grid.cols();
      const int col = static_cast<int>(idx) % grid.cols();
      diagnostics->push_back({row, col, "chord deviates " + std::to_string(deviation[idx]) + " px from the road"});
    }
  }
  return grid;
}

}  // namespace palis
