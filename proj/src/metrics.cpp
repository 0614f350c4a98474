#include "palis/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <unordered_map>

#include "palis/error.hpp"
#include "palis/parallel.hpp"

namespace palis {

void AplsParams::validate() const {
  if (!(control_point_spacing > 0.0) || !(snap_radius > 0.0)) {
    throw InvariantError("APLS spacing and snap radius must be positive");
  }
}

void TopoParams::validate() const {
  if (!(seed_interval > 0.0) || !(match_radius > 0.0) || !(propagation_radius > 0.0) || !(marble_interval > 0.0)) {
    throw InvariantError("TOPO parameters must be positive");
  }
  if (marble_interval > propagation_radius) {
    throw InvariantError("marble interval exceeds the propagation radius");
  }
}

RoadGraph densify(const RoadGraph& g, double spacing) {
  if (!(spacing > 0.0)) throw InvariantError("densify spacing must be positive");
  RoadGraph out;
  out.vertices = g.vertices;
  for (const Edge& e : g.edges) {
    const double len = g.edge_length(e);
    const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(len / spacing)));
    const Point a = g.vertices[e.u];
    const Point b = g.vertices[e.v];
    std::uint32_t prev = e.u;
    for (std::size_t k = 1; k < pieces; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(pieces);
      const std::uint32_t mid = out.add_vertex(a + t * (b - a));
      out.add_edge(prev, mid);
      prev = mid;
    }
    out.add_edge(prev, e.v);
  }
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Uniform bucket grid for radius queries.
class PointIndex {
 public:
  PointIndex(const std::vector<Point>& points, double cell) : points_(points), cell_(cell) {
    for (std::uint32_t i = 0; i < points.size(); ++i) buckets_[key(points[i])].push_back(i);
  }

  template <typename Fn>
  void for_each_within(Point q, double radius, Fn&& fn) const {
    const auto [cx, cy] = coords(q);
    const auto reach = static_cast<std::int64_t>(std::ceil(radius / cell_));
    for (std::int64_t dx = -reach; dx <= reach; ++dx) {
      for (std::int64_t dy = -reach; dy <= reach; ++dy) {
        const auto it = buckets_.find(pack(cx + dx, cy + dy));
        if (it == buckets_.end()) continue;
        for (std::uint32_t i : it->second) {
          const double d = distance(points_[i], q);
          if (d <= radius) fn(i, d);
        }
      }
    }
  }

 private:
  std::pair<std::int64_t, std::int64_t> coords(Point p) const {
    return {static_cast<std::int64_t>(std::floor(p.x / cell_)), static_cast<std::int64_t>(std::floor(p.y / cell_))};
  }
  static std::uint64_t pack(std::int64_t x, std::int64_t y) {
    return (static_cast<std::uint64_t>(x) << 32) ^ static_cast<std::uint64_t>(y & 0xffffffff);
  }
  std::uint64_t key(Point p) const {
    const auto [x, y] = coords(p);
    return pack(x, y);
  }

  const std::vector<Point>& points_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
};

// Score of one direction: control points of `from` are projected onto the
// nearest location of `to` and inserted there as nodes.
double directional_apls(const RoadGraph& from, const RoadGraph& to, const AplsParams& params) {
  const RoadGraph a = densify(from, params.control_point_spacing);
  if (a.edges.empty()) return to.edges.empty() ? 1.0 : 0.0;
  if (to.edges.empty()) return 0.0;

  constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();
  RoadGraph host;
  host.vertices = to.vertices;
  std::vector<std::uint32_t> snap(a.vertex_count(), kNone);
  std::vector<std::vector<std::pair<double, std::uint32_t>>> inserted(to.edge_count());
  for (std::uint32_t i = 0; i < a.vertex_count(); ++i) {
    const auto hit = nearest_point_on_graph(to, a.vertices[i], params.snap_radius);
    if (!hit) continue;
    snap[i] = host.add_vertex(hit->position);
    inserted[hit->where.edge].emplace_back(hit->where.offset, snap[i]);
  }
  Adjacency adj_b(host);
  auto link = [&](std::uint32_t u, std::uint32_t v, double len) {
    adj_b.arcs[u].push_back({v, len});
    adj_b.arcs[v].push_back({u, len});
  };
  for (std::uint32_t k = 0; k < to.edge_count(); ++k) {
    auto& chain = inserted[k];
    std::sort(chain.begin(), chain.end());
    std::uint32_t prev = to.edges[k].u;
    double prev_offset = 0.0;
    for (const auto& [offset, v] : chain) {
      link(prev, v, offset - prev_offset);
      prev = v;
      prev_offset = offset;
    }
    link(prev, to.edges[k].v, std::max(0.0, to.edge_length(to.edges[k]) - prev_offset));
  }

  const Adjacency adj_a(a);
  std::vector<double> penalty_sum(a.vertex_count(), 0.0);
  std::vector<std::size_t> pair_count(a.vertex_count(), 0);
  parallel_for(a.vertex_count(), [&](std::size_t i) {
    const std::vector<double> da = shortest_path_lengths(adj_a, static_cast<std::uint32_t>(i));
    std::vector<double> db;
    if (snap[i] != kNone) db = shortest_path_lengths(adj_b, snap[i]);
    for (std::size_t j = i + 1; j < a.vertex_count(); ++j) {
      const double la = da[j];
      if (!std::isfinite(la) || la <= 0.0) continue;
      double penalty = 1.0;
      if (snap[i] != kNone && snap[j] != kNone) {
        const double lb = db[snap[j]];
        if (std::isfinite(lb)) penalty = std::min(1.0, std::abs(la - lb) / la);
      }
      penalty_sum[i] += penalty;
      ++pair_count[i];
    }
  });

  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < penalty_sum.size(); ++i) {
    total += penalty_sum[i];
    pairs += pair_count[i];
  }
  if (pairs == 0) return 1.0;
  return 1.0 - total / static_cast<double>(pairs);
}

}  // namespace

AplsBreakdown apls_breakdown(const RoadGraph& gt, const RoadGraph& prop, const AplsParams& params) {
  params.validate();
  if (gt.empty()) throw UsageError("APLS needs a non-empty ground-truth graph");
  if (prop.empty()) return {};
  AplsBreakdown out;
  out.gt_to_prop = directional_apls(gt, prop, params);
  out.prop_to_gt = directional_apls(prop, gt, params);
  out.score = 0.5 * (out.gt_to_prop + out.prop_to_gt);
  return out;
}

double apls(const RoadGraph& gt, const RoadGraph& prop, const AplsParams& params) {
  return apls_breakdown(gt, prop, params).score;
}

std::optional<GraphProjection> nearest_point_on_graph(const RoadGraph& g, Point p, double max_distance) {
  std::optional<GraphProjection> best;
  for (std::uint32_t k = 0; k < g.edge_count(); ++k) {
    const LineSegment seg = g.edge_segment(g.edges[k]);
    const double len = seg.length();
    double offset = 0.0;
    if (len > 0.0) offset = std::clamp(dot(p - seg.a, seg.direction()) / len, 0.0, len);
    const Point foot = len > 0.0 ? seg.a + (offset / len) * seg.direction() : seg.a;
    const double d = distance(p, foot);
    if (d > max_distance) continue;
    if (!best || d < best->distance) best = GraphProjection{{k, offset}, foot, d};
  }
  return best;
}

namespace {

constexpr double kSampleEps = 1e-9;

struct SplitGraph {
  std::vector<Point> vertices;
  struct Arc {
    std::uint32_t u, v;
    double length;
  };
  std::vector<Arc> arcs;
  std::uint32_t source;
};

// Copy of g with `origin` inserted as a vertex (or mapped onto an endpoint
// when it sits on one).
SplitGraph split_at(const RoadGraph& g, const PointOnEdge& origin) {
  SplitGraph s;
  s.vertices = g.vertices;
  const Edge& host = g.edges.at(origin.edge);
  const double host_len = g.edge_length(host);
  bool split = false;
  if (origin.offset <= kSampleEps) {
    s.source = host.u;
  } else if (origin.offset >= host_len - kSampleEps) {
    s.source = host.v;
  } else {
    split = true;
    const Point a = g.vertices[host.u];
    const Point b = g.vertices[host.v];
    s.vertices.push_back(a + (origin.offset / host_len) * (b - a));
    s.source = static_cast<std::uint32_t>(s.vertices.size() - 1);
  }
  for (std::uint32_t k = 0; k < g.edge_count(); ++k) {
    const Edge& e = g.edges[k];
    if (split && k == origin.edge) {
      s.arcs.push_back({e.u, s.source, origin.offset});
      s.arcs.push_back({s.source, e.v, host_len - origin.offset});
    } else {
      s.arcs.push_back({e.u, e.v, g.edge_length(e)});
    }
  }
  return s;
}

bool near_multiple(double d, double interval) {
  const double k = std::round(d / interval);
  return std::abs(d - k * interval) <= kSampleEps;
}

}  // namespace

std::vector<Point> geodesic_marbles(const RoadGraph& g, const PointOnEdge& origin, double interval, double radius) {
  const SplitGraph s = split_at(g, origin);
  RoadGraph shape;
  shape.vertices = s.vertices;
  Adjacency adj(shape);
  for (const auto& arc : s.arcs) {
    adj.arcs[arc.u].push_back({arc.v, arc.length});
    adj.arcs[arc.v].push_back({arc.u, arc.length});
  }
  const std::vector<double> dist = shortest_path_lengths(adj, s.source);

  std::vector<Point> out;
  for (std::uint32_t v = 0; v < s.vertices.size(); ++v) {
    if (dist[v] <= radius + kSampleEps && near_multiple(dist[v], interval)) out.push_back(s.vertices[v]);
  }
  for (const auto& arc : s.arcs) {
    const double du = dist[arc.u];
    const double dv = dist[arc.v];
    const double len = arc.length;
    if (!std::isfinite(du) || !std::isfinite(dv) || len <= 2.0 * kSampleEps) continue;
    const Point a = s.vertices[arc.u];
    const Point b = s.vertices[arc.v];
    auto at = [&](double x) { return a + (x / len) * (b - a); };
    // Geodesic distance along the arc is min(du + x, dv + len - x).
    const double peak = std::clamp(0.5 * (dv + len - du), 0.0, len);
    for (double k = std::floor(du / interval) + 1.0;; k += 1.0) {
      const double x = k * interval - du;
      if (k * interval > radius + kSampleEps || x > peak || x >= len - kSampleEps) break;
      if (x > kSampleEps) out.push_back(at(x));
    }
    for (double k = std::floor(dv / interval) + 1.0;; k += 1.0) {
      const double y = k * interval - dv;
      if (k * interval > radius + kSampleEps || y >= len - peak - kSampleEps || y >= len - kSampleEps) break;
      if (y > kSampleEps) out.push_back(at(len - y));
    }
  }
  return out;
}

std::vector<PointOnEdge> seed_locations(const RoadGraph& g, double interval) {
  std::vector<PointOnEdge> seeds;
  std::vector<bool> placed(g.vertex_count(), false);
  for (std::uint32_t k = 0; k < g.edge_count(); ++k) {
    const Edge& e = g.edges[k];
    const double len = g.edge_length(e);
    if (!placed[e.u]) {
      placed[e.u] = true;
      seeds.push_back({k, 0.0});
    }
    if (!placed[e.v]) {
      placed[e.v] = true;
      seeds.push_back({k, len});
    }
    const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(len / interval)));
    for (std::size_t j = 1; j < pieces; ++j) {
      seeds.push_back({k, len * static_cast<double>(j) / static_cast<double>(pieces)});
    }
  }
  return seeds;
}

std::size_t greedy_match_count(const std::vector<Point>& marbles, const std::vector<Point>& holes, double radius) {
  if (marbles.empty() || holes.empty()) return 0;
  const PointIndex index(holes, radius);
  std::vector<std::tuple<double, std::uint32_t, std::uint32_t>> pairs;
  for (std::uint32_t m = 0; m < marbles.size(); ++m) {
    index.for_each_within(marbles[m], radius, [&](std::uint32_t h, double d) { pairs.emplace_back(d, m, h); });
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<bool> marble_used(marbles.size(), false);
  std::vector<bool> hole_used(holes.size(), false);
  std::size_t matched = 0;
  for (const auto& [d, m, h] : pairs) {
    if (marble_used[m] || hole_used[h]) continue;
    marble_used[m] = hole_used[h] = true;
    ++matched;
  }
  return matched;
}

std::size_t max_match_count(const std::vector<Point>& marbles, const std::vector<Point>& holes, double radius) {
  if (marbles.empty() || holes.empty()) return 0;
  const PointIndex index(holes, radius);
  std::vector<std::vector<std::uint32_t>> adj(marbles.size());
  for (std::uint32_t m = 0; m < marbles.size(); ++m) {
    index.for_each_within(marbles[m], radius, [&](std::uint32_t h, double) { adj[m].push_back(h); });
    std::sort(adj[m].begin(), adj[m].end());
  }
  constexpr auto kFree = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> hole_owner(holes.size(), kFree);
  std::vector<std::uint32_t> visit_stamp(holes.size(), 0);
  std::uint32_t stamp = 0;

  // Kuhn's augmenting paths, iterative to keep the stack flat.
  auto augment = [&](std::uint32_t root) {
    struct Frame {
      std::uint32_t marble;
      std::size_t next;
    };
    std::vector<Frame> stack{{root, 0}};
    std::vector<std::uint32_t> via;  // hole chosen at each frame
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next == adj[f.marble].size()) {
        stack.pop_back();
        if (!via.empty()) via.pop_back();
        continue;
      }
      const std::uint32_t h = adj[f.marble][f.next++];
      if (visit_stamp[h] == stamp) continue;
      visit_stamp[h] = stamp;
      via.push_back(h);
      if (hole_owner[h] == kFree) {
        for (std::size_t k = 0; k < via.size(); ++k) hole_owner[via[k]] = stack[k].marble;
        return true;
      }
      stack.push_back({hole_owner[h], 0});
    }
    return false;
  };

  std::size_t matched = 0;
  for (std::uint32_t m = 0; m < marbles.size(); ++m) {
    ++stamp;
    if (augment(m)) ++matched;
  }
  return matched;
}

TopoScore topo(const RoadGraph& gt, const RoadGraph& prop, const TopoParams& params,
               std::vector<TopoSeedRecord>* per_seed) {
  params.validate();
  if (gt.empty()) throw UsageError("TOPO needs a non-empty ground-truth graph");

  const std::vector<PointOnEdge> seeds = seed_locations(gt, params.seed_interval);
  std::vector<TopoSeedRecord> records(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    TopoSeedRecord& rec = records[i];
    const Edge& host = gt.edges[seeds[i].edge];
    const double len = gt.edge_length(host);
    const Point a = gt.vertices[host.u];
    rec.seed = len > 0.0 ? a + (seeds[i].offset / len) * (gt.vertices[host.v] - a) : a;

    const std::vector<Point> holes =
        geodesic_marbles(gt, seeds[i], params.marble_interval, params.propagation_radius);
    rec.holes = holes.size();
    const auto hit = nearest_point_on_graph(prop, rec.seed, params.match_radius);
    if (!hit) return;
    rec.matched = true;
    const std::vector<Point> marbles =
        geodesic_marbles(prop, hit->where, params.marble_interval, params.propagation_radius);
    rec.marbles = marbles.size();
    rec.matches = params.matching == MarbleMatching::Greedy
                      ? greedy_match_count(marbles, holes, params.match_radius)
                      : max_match_count(marbles, holes, params.match_radius);
  });

  std::size_t holes = 0;
  std::size_t marbles = 0;
  std::size_t matches = 0;
  for (const TopoSeedRecord& r : records) {
    holes += r.holes;
    marbles += r.marbles;
    matches += r.matches;
  }
  TopoScore score;
  score.precision = marbles == 0 ? 0.0 : static_cast<double>(matches) / static_cast<double>(marbles);
  score.recall = holes == 0 ? 0.0 : static_cast<double>(matches) / static_cast<double>(holes);
  const double pr = score.precision + score.recall;
  score.f1 = pr > 0.0 ? 2.0 * score.precision * score.recall / pr : 0.0;
  if (per_seed) *per_seed = std::move(records);
  return score;
}

}  // namespace palis
