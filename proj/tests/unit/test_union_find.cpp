#include <gtest/gtest.h>

#include <random>

#include "palis/union_find.hpp"

using namespace palis;

TEST(VertexMergeSet, CentroidOfMembers) {
  VertexMergeSet s;
  const auto a = s.add({0, 0});
  const auto b = s.add({2, 0});
  const auto c = s.add({10, 10});
  const auto d = s.add({1, 3});
  s.merge(a, b);
  s.merge(b, d);
  EXPECT_EQ(s.find(a), s.find(d));
  EXPECT_NE(s.find(a), s.find(c));
  const auto r = s.resolve();
  ASSERT_EQ(r.centroid.size(), 2u);
  EXPECT_EQ(r.label[a], 0u);
  EXPECT_EQ(r.label[c], 1u);
  EXPECT_EQ(r.label[d], 0u);
  EXPECT_DOUBLE_EQ(r.centroid[0].x, 1.0);
  EXPECT_DOUBLE_EQ(r.centroid[0].y, 1.0);
  EXPECT_EQ(r.centroid[1], (Point{10, 10}));
}

TEST(VertexMergeSet, MatchesNaiveLabeling) {
  std::mt19937_64 rng(1);
  const int n = 200;
  VertexMergeSet s;
  std::vector<int> naive(n);
  for (int k = 0; k < n; ++k) {
    s.add({static_cast<double>(k), 0});
    naive[k] = k;
  }
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int m = 0; m < 150; ++m) {
    const int a = pick(rng), b = pick(rng);
    s.merge(a, b);
    const int from = naive[b], to = naive[a];
    for (int& x : naive) {
      if (x == from) x = to;
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      ASSERT_EQ(s.find(i) == s.find(j), naive[i] == naive[j]);
    }
  }
}
