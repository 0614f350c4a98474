#include "palis/reconstruct.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <tuple>
#include <utility>

#include "palis/error.hpp"
#include "palis/union_find.hpp"

namespace palis {

void ReconstructParams::validate() const {
  if (!(tau_d > 0.0)) throw InvariantError("tau_d must be positive");
  if (!(tau_a > 0.0 && tau_a <= 90.0)) throw InvariantError("tau_a must lie in (0, 90]");
  if (neighbor_radius < 1) throw InvariantError("neighbor_radius must be at least 1");
}

std::vector<CellIndex> neighbors(const PatchGrid& grid, int row, int col, int radius) {
  std::vector<CellIndex> out;
  for (int r = row - radius; r <= row + radius; ++r) {
    for (int c = col - radius; c <= col + radius; ++c) {
      if ((r == row && c == col) || !grid.in_bounds(r, c)) continue;
      if (grid.at(r, c).cls == PatchClass::I) out.push_back({r, c});
    }
  }
  return out;
}

End nearer_endpoint(const LineSegment& l, const LineSegment& target) {
  return point_segment_distance(l.b, target) < point_segment_distance(l.a, target) ? End::B : End::A;
}

End nearer_endpoint(const LineSegment& l, Point target) {
  return distance(l.b, target) < distance(l.a, target) ? End::B : End::A;
}

std::optional<EndpointJoin> connect_I(const LineSegment& l_i, const LineSegment& l_j, double tau_d) {
  const End end_i = nearer_endpoint(l_i, l_j);
  const End end_j = nearer_endpoint(l_j, l_i);
  const double mean =
      0.5 * (point_segment_distance(endpoint(l_j, end_j), l_i) + point_segment_distance(endpoint(l_i, end_i), l_j));
  if (mean > tau_d) return std::nullopt;
  return EndpointJoin{end_i, end_j, mean};
}

std::optional<XResolution> resolve_X(const PatchRect& cell, std::span<const LineSegment> segs) {
  if (segs.size() < 2) return std::nullopt;
  constexpr double kInsideTolerance = 1e-9;

  Point sum{};
  std::size_t valid = 0;
  std::vector<bool> participates(segs.size(), false);
  for (std::size_t m = 0; m < segs.size(); ++m) {
    for (std::size_t n = m + 1; n < segs.size(); ++n) {
      if (segs[m].is_degenerate() || segs[n].is_degenerate()) continue;
      const auto p = segment_intersection(segs[m], segs[n]);
      if (!p || !cell.contains(*p, kInsideTolerance)) continue;
      sum = sum + *p;
      ++valid;
      participates[m] = participates[n] = true;
    }
  }

  XResolution out;
  if (valid > 0) {
    out.intersection = (1.0 / static_cast<double>(valid)) * sum;
    for (std::size_t m = 0; m < segs.size(); ++m) {
      if (participates[m]) out.links.push_back({m, nearer_endpoint(segs[m], out.intersection)});
    }
    return out;
  }

  out.fallback = true;
  const Point center = cell.center();
  Point facing_sum{};
  for (std::size_t m = 0; m < segs.size(); ++m) {
    const End e = nearer_endpoint(segs[m], center);
    out.links.push_back({m, e});
    facing_sum = facing_sum + endpoint(segs[m], e);
  }
  out.intersection = (1.0 / static_cast<double>(segs.size())) * facing_sum;
  return out;
}

double lateral_offset(const LineSegment& l_m, End end_m, const LineSegment& l_n, End end_n) {
  return 0.5 * (perpendicular_line_distance(endpoint(l_m, end_m), l_n) +
                perpendicular_line_distance(endpoint(l_n, end_n), l_m));
}

namespace {

End other(End e) { return e == End::A ? End::B : End::A; }

// Endpoint pair with the smallest gap.
std::pair<End, End> facing_ends(const LineSegment& m, const LineSegment& n) {
  std::pair<End, End> best{End::A, End::A};
  double best_d = distance(m.a, n.a);
  for (End em : {End::A, End::B}) {
    for (End en : {End::A, End::B}) {
      const double d = distance(endpoint(m, em), endpoint(n, en));
      if (d < best_d) {
        best_d = d;
        best = {em, en};
      }
    }
  }
  return best;
}

}  // namespace

std::vector<CrossingLink> resolve_T(const PatchRect& cell, std::span<const LineSegment> segs, double tau_d,
                                    double tau_a) {
  constexpr double kMinGap = 1e-6;
  std::vector<CrossingLink> candidates;
  for (std::size_t m = 0; m < segs.size(); ++m) {
    for (std::size_t n = m + 1; n < segs.size(); ++n) {
      const LineSegment& lm = segs[m];
      const LineSegment& ln = segs[n];
      if (lm.is_degenerate() || ln.is_degenerate()) continue;
      const auto [em, en] = facing_ends(lm, ln);
      const Point pm = endpoint(lm, em);
      const Point pn = endpoint(ln, en);
      if (cell.distance_to(pm) > tau_d || cell.distance_to(pn) > tau_d) continue;
      const Point gap = pn - pm;
      if (norm(gap) <= kMinGap) continue;
      if (dot(pm - endpoint(lm, other(em)), gap) <= 0.0) continue;
      if (dot(pn - endpoint(ln, other(en)), pm - pn) <= 0.0) continue;
      if (angle_difference(lm, ln) > tau_a) continue;
      const double offset = lateral_offset(lm, em, ln, en);
      if (offset > tau_d) continue;
      candidates.push_back({m, n, em, en, offset});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const CrossingLink& x, const CrossingLink& y) {
    return std::tie(x.offset, x.m, x.n) < std::tie(y.offset, y.m, y.n);
  });

  std::set<std::pair<std::size_t, End>> used;
  std::vector<CrossingLink> accepted;
  for (const CrossingLink& c : candidates) {
    if (used.count({c.m, c.end_m}) || used.count({c.n, c.end_n})) continue;
    used.insert({c.m, c.end_m});
    used.insert({c.n, c.end_n});
    accepted.push_back(c);
  }
  return accepted;
}

RoadGraph reconstruct_graph(const PatchGrid& grid, const ReconstructParams& params,
                            std::vector<std::string>* diagnostics) {
  params.validate();
  VertexMergeSet merge;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> links;
  std::vector<std::array<std::uint32_t, 2>> ends(grid.cell_count());

  auto note = [&](int row, int col, const std::string& what) {
    if (diagnostics) {
      diagnostics->push_back("cell (" + std::to_string(row) + ", " + std::to_string(col) + "): " + what);
    }
  };
  auto end_vertex = [&](const CellIndex& c, End e) { return ends[grid.index(c.row, c.col)][static_cast<int>(e)]; };

  for (std::size_t idx : grid.i_cells()) {
    const LineSegment& l = *grid.cells()[idx].segment;
    const std::uint32_t a = merge.add(l.a);
    const std::uint32_t b = l.is_degenerate() ? a : merge.add(l.b);
    ends[idx] = {a, b};
    if (a != b) links.emplace_back(a, b);
  }

  for (int row = 0; row < grid.rows(); ++row) {
    for (int col = 0; col < grid.cols(); ++col) {
      const PatchCell& cell = grid.at(row, col);
      if (cell.cls == PatchClass::Background) continue;
      const std::vector<CellIndex> near = neighbors(grid, row, col, params.neighbor_radius);
      std::vector<LineSegment> segs;
      segs.reserve(near.size());
      for (const CellIndex& n : near) segs.push_back(*grid.at(n.row, n.col).segment);

      switch (cell.cls) {
        case PatchClass::I: {
          const LineSegment& self = *cell.segment;
          const std::size_t self_idx = grid.index(row, col);
          for (std::size_t k = 0; k < near.size(); ++k) {
            // Each unordered pair is visited once, from its earlier cell.
            if (grid.index(near[k].row, near[k].col) < self_idx) continue;
            if (const auto join = connect_I(self, segs[k], params.tau_d)) {
              merge.merge(end_vertex({row, col}, join->end_i), end_vertex(near[k], join->end_j));
            }
          }
          break;
        }
        case PatchClass::X: {
          const auto res = resolve_X(grid.rect(row, col), segs);
          if (!res) {
            note(row, col, "X-cell with fewer than two neighbor segments skipped");
            break;
          }
          if (res->fallback) note(row, col, "no intersection inside the X-cell; using the facing-endpoint centroid");
          const std::uint32_t hub = merge.add(res->intersection);
          for (const JunctionLink& link : res->links) links.emplace_back(hub, end_vertex(near[link.segment], link.end));
          break;
        }
        case PatchClass::T: {
          for (const CrossingLink& c :
               resolve_T(grid.rect(row, col), segs, params.tau_d, params.tau_a)) {
            links.emplace_back(end_vertex(near[c.m], c.end_m), end_vertex(near[c.n], c.end_n));
          }
          break;
        }
        case PatchClass::Background:
          break;
      }
    }
  }

  const VertexMergeSet::Resolved resolved = merge.resolve();
  RoadGraph g;
  g.vertices = resolved.centroid;
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (const auto& [p, q] : links) {
    const std::uint32_t u = resolved.label[p];
    const std::uint32_t v = resolved.label[q];
    if (u == v) continue;
    if (!seen.insert(std::minmax(u, v)).second) continue;
    g.add_edge(u, v);
  }
  return g;
}

}  // namespace palis
