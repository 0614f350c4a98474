#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "palis/codec.hpp"
#include "palis/error.hpp"

using namespace palis;

namespace {

RoadGraph plus_graph(Point c, double arm) {
  RoadGraph g;
  const auto hub = g.add_vertex(c);
  for (Point d : {Point{1, 0}, Point{0, 1}, Point{-1, 0}, Point{0, -1}}) g.add_edge(hub, g.add_vertex(c + arm * d));
  return g;
}

RoadGraph overpass_graph(Point c, double arm) {
  RoadGraph g;
  g.add_edge(g.add_vertex({c.x - arm, c.y}), g.add_vertex({c.x + arm, c.y}));
  g.add_edge(g.add_vertex({c.x, c.y - arm}), g.add_vertex({c.x, c.y + arm}));
  return g;
}

// Vertices shared by two pieces, found by enumeration of piece points.
bool pieces_share_graph_vertex(const std::vector<Traversal>& pieces, const RoadGraph& g, const PatchRect& rect) {
  for (const Point v : g.vertices) {
    if (!rect.contains(v)) continue;
    int hits = 0;
    for (const Traversal& t : pieces) {
      for (const Point p : t.piece) {
        if (distance(p, v) < 1e-12) {
          ++hits;
          break;
        }
      }
    }
    if (hits >= 2) return true;
  }
  return false;
}

}  // namespace

TEST(Traversals, Counts) {
  const PatchRect rect{1, 1, 8};
  EXPECT_TRUE(traversals_in_patch(RoadGraph{}, rect).empty());

  RoadGraph line;
  line.add_edge(line.add_vertex({0, 12}), line.add_vertex({24, 12}));
  EXPECT_EQ(traversals_in_patch(line, rect).size(), 1u);

  const RoadGraph plus = plus_graph({12, 12}, 12);
  const auto pieces = traversals_in_patch(plus, rect);
  EXPECT_EQ(pieces.size(), 2u);
  EXPECT_TRUE(pieces_share_graph_vertex(pieces, plus, rect));
}

TEST(ClassifyPatch, Classes) {
  const PatchRect rect{1, 1, 8};
  EXPECT_EQ(classify_patch({}, RoadGraph{}, rect), PatchClass::Background);

  RoadGraph line;
  line.add_edge(line.add_vertex({0, 12}), line.add_vertex({24, 12}));
  EXPECT_EQ(classify_patch(traversals_in_patch(line, rect), line, rect), PatchClass::I);

  const RoadGraph plus = plus_graph({12, 12}, 12);
  const auto plus_pieces = traversals_in_patch(plus, rect);
  ASSERT_TRUE(pieces_share_graph_vertex(plus_pieces, plus, rect));
  EXPECT_EQ(classify_patch(plus_pieces, plus, rect), PatchClass::X);

  const RoadGraph over = overpass_graph({12, 12}, 12);
  const auto over_pieces = traversals_in_patch(over, rect);
  ASSERT_EQ(over_pieces.size(), 2u);
  ASSERT_FALSE(pieces_share_graph_vertex(over_pieces, over, rect));
  EXPECT_EQ(classify_patch(over_pieces, over, rect), PatchClass::T);
}

TEST(ChordOfPiece, Examples) {
  EXPECT_EQ(chord_of_piece({{0, 4}, {8, 4}}), (LineSegment{{0, 4}, {8, 4}}));
  EXPECT_EQ(chord_of_piece({{0, 4}, {4, 4}, {4, 8}}), (LineSegment{{0, 4}, {4, 8}}));
  EXPECT_EQ(chord_of_piece({{0, 4}, {3, 4}}), (LineSegment{{0, 4}, {3, 4}}));
  EXPECT_THROW(chord_of_piece({{1, 1}}), InvariantError);
  EXPECT_NEAR(chord_deviation({{0, 4}, {4, 4}, {4, 8}}), std::sqrt(8.0), 1e-12);
}

TEST(RoadPaths, CrossingGivesTwoRoads) {
  EXPECT_EQ(road_paths(plus_graph({12, 12}, 10)).size(), 2u);
  RoadGraph chain;
  const auto a = chain.add_vertex({0, 0});
  const auto b = chain.add_vertex({5, 0});
  const auto c = chain.add_vertex({9, 3});
  chain.add_edge(a, b);
  chain.add_edge(b, c);
  const auto roads = road_paths(chain);
  ASSERT_EQ(roads.size(), 1u);
  EXPECT_EQ(roads[0].vertices.size(), 3u);
}

TEST(EncodeGraph, EmptyIsAllBackground) {
  const PatchGrid grid = encode_graph(RoadGraph{}, 64, 64);
  EXPECT_EQ(grid.count(PatchClass::Background), 64u);
  EXPECT_THROW(encode_graph(RoadGraph{}, 60, 64), InvariantError);
}

TEST(EncodeGraph, HorizontalRoadMatchesPixelMembership) {
  RoadGraph g;
  g.add_edge(g.add_vertex({0, 20}), g.add_vertex({64, 20}));
  const PatchGrid grid = encode_graph(g, 64, 64, 8);
  // Oracle: a patch holds the road iff some pixel center in it lies within
  // 0.5 px of the centerline.
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      bool hit = false;
      for (int i = 0; i < 8 && !hit; ++i) {
        for (int j = 0; j < 8 && !hit; ++j) {
          hit = oracle::sampled_segment_distance({c * 8 + j + 0.5, r * 8 + i + 0.5}, g.edge_segment(g.edges[0]), 6400) <= 0.5;
        }
      }
      const PatchCell& cell = grid.at(r, c);
      EXPECT_EQ(cell.cls, hit ? PatchClass::I : PatchClass::Background) << r << "," << c;
      if (hit) {
        ASSERT_TRUE(cell.segment);
        EXPECT_DOUBLE_EQ(cell.segment->a.y, 20.0);
        EXPECT_DOUBLE_EQ(cell.segment->b.y, 20.0);
        EXPECT_DOUBLE_EQ(std::abs(cell.segment->b.x - cell.segment->a.x), 8.0);
      }
    }
  }
}

TEST(EncodeGraph, ShortStubIgnored) {
  RoadGraph g;
  g.add_edge(g.add_vertex({7.8, 4}), g.add_vertex({8.2, 4}));
  const PatchGrid grid = encode_graph(g, 16, 16, 8);
  EXPECT_EQ(grid.count(PatchClass::I), 0u);
}

TEST(EncodeGraph, ChordsStayInsideCells) {
  const RoadGraph g = plus_graph({36.3, 27.9}, 25);
  const PatchGrid grid = encode_graph(g, 64, 64, 8);
  EXPECT_NO_THROW(grid.validate());
  EXPECT_EQ(grid.count(PatchClass::X), 1u);
}
