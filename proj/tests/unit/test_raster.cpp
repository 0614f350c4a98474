#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "palis/error.hpp"
#include "palis/raster.hpp"

using namespace palis;

TEST(RasterizePatch, SpotValues) {
  const RasterParams params;
  const PatchRect rect{0, 0, 8};
  // Horizontal segment through pixel row 1 centers, y = 1.5.
  const LineSegment l{{0.5, 1.5}, {4.5, 1.5}};
  const auto v = rasterize_patch(l, rect, params);
  EXPECT_NEAR(v[1 * 8 + 2], 1.0, 1e-12);
  // Pixel (3, 2): center (2.5, 3.5), d = 2 inside the projection.
  EXPECT_NEAR(v[3 * 8 + 2], std::exp(-0.5), 1e-9);
  EXPECT_NEAR(v[3 * 8 + 2], oracle::pixel_value(l, {2.5, 3.5}, params), 1e-12);
  // Pixel (1, 6): center (6.5, 1.5), d = 2 beyond b.
  EXPECT_NEAR(v[1 * 8 + 6], std::exp(-5.0), 1e-9);
  EXPECT_NEAR(v[1 * 8 + 6], oracle::pixel_value(l, {6.5, 1.5}, params), 1e-12);
}

TEST(RasterizePatch, DegenerateUsesInnerFactor) {
  const RasterParams params;
  const LineSegment l{{2.5, 2.5}, {2.5, 2.5}};
  const auto v = rasterize_patch(l, {0, 0, 8}, params);
  EXPECT_NEAR(v[2 * 8 + 4], std::exp(-4.0 / 8.0), 1e-12);
}

TEST(RasterizePatch, RandomMatchesLongDoubleOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 8);
  const RasterParams params;
  for (int k = 0; k < 200; ++k) {
    const PatchRect rect{1, 2, 8};
    const Point o = rect.origin();
    const LineSegment l{{o.x + u(rng), o.y + u(rng)}, {o.x + u(rng), o.y + u(rng)}};
    const auto v = rasterize_patch(l, rect, params);
    const auto ref = oracle::patch_values(l, rect, params);
    for (std::size_t n = 0; n < v.size(); ++n) ASSERT_NEAR(v[n], ref[n], 1e-12);
  }
}

TEST(ComposeSoftMask, Locality) {
  PatchGrid grid(32, 32, 8);
  const RasterParams params;
  const SoftMask empty = compose_soft_mask(grid, params);
  EXPECT_EQ(empty.sum(), 0.0);

  grid.set_segment(1, 2, {{16, 12}, {24, 12}});
  const SoftMask one = compose_soft_mask(grid, params);
  for (int r = 0; r < 32; ++r) {
    for (int c = 0; c < 32; ++c) {
      const bool inside = r >= 8 && r < 16 && c >= 16 && c < 24;
      if (inside) EXPECT_GT(one.at(r, c), 0.0);
      else EXPECT_EQ(one.at(r, c), 0.0);
    }
  }
}

TEST(ComposeSoftMask, TwoCellsMatchPerPixelOracle) {
  PatchGrid grid(32, 32, 8);
  const RasterParams params;
  const LineSegment l1{{0, 13.3}, {8, 13.3}};
  const LineSegment l2{{8, 13.3}, {16, 13.3}};
  grid.set_segment(1, 0, l1);
  grid.set_segment(1, 1, l2);
  const SoftMask m = compose_soft_mask(grid, params);
  for (int r = 0; r < 32; ++r) {
    for (int c = 0; c < 32; ++c) {
      double expect = 0.0;
      if (r >= 8 && r < 16 && c < 8) expect = oracle::pixel_value(l1, {c + 0.5, r + 0.5}, params);
      if (r >= 8 && r < 16 && c >= 8 && c < 16) expect = oracle::pixel_value(l2, {c + 0.5, r + 0.5}, params);
      EXPECT_NEAR(m.at(r, c), expect, 1e-7);
    }
  }
}

TEST(DiceLoss, Examples) {
  const SoftMask ones(10, 10, 1.0);
  EXPECT_NEAR(dice_loss(ones, ones), 0.0, 1e-15);

  SoftMask a(4, 4), b(4, 4);
  a.at(0, 0) = 1.0;
  b.at(3, 3) = 1.0;
  EXPECT_NEAR(dice_loss(a, b), 1.0 - 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(dice_loss(a, b), oracle::dice({a.values().begin(), a.values().end()},
                                            {b.values().begin(), b.values().end()}),
              1e-15);

  SoftMask big_a(100, 100), big_b(100, 100);
  for (int c = 0; c < 50; ++c) {
    for (int r = 0; r < 100; ++r) {
      big_a.at(r, c) = 1.0;
      big_b.at(r, c + 50) = 1.0;
    }
  }
  EXPECT_GT(dice_loss(big_a, big_b), 0.9998);

  const SoftMask z(5, 5);
  EXPECT_EQ(dice_loss(z, z), 0.0);
  EXPECT_THROW(dice_loss(SoftMask(4, 4), SoftMask(4, 5)), UsageError);
}

namespace {

std::vector<double> fd_dice(const SoftMask& s, const SoftMask& t, double h) {
  std::vector<double> g(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    std::vector<double> plus(s.values().begin(), s.values().end());
    std::vector<double> minus = plus;
    const std::vector<double> tv(t.values().begin(), t.values().end());
    plus[k] += h;
    minus[k] -= h;
    g[k] = (oracle::dice(plus, tv) - oracle::dice(minus, tv)) / (2 * h);
  }
  return g;
}

}  // namespace

TEST(DiceBackward, MatchesFiniteDifferences) {
  const SoftMask ones(6, 6, 1.0);
  const auto g = dice_backward(ones, ones);
  const auto fd = fd_dice(ones, ones, 1e-6);
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_NEAR(g[k], g[0], 1e-15);
    EXPECT_NEAR(g[k], fd[k], 1e-8);
  }

  const SoftMask z(6, 6);
  const auto gz = dice_backward(z, z);
  const auto fdz = fd_dice(z, z, 1e-6);
  for (std::size_t k = 0; k < gz.size(); ++k) {
    EXPECT_TRUE(std::isfinite(gz[k]));
    EXPECT_NEAR(gz[k], fdz[k], 1e-8);
  }

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  SoftMask s(7, 5), t(7, 5);
  for (double& v : s.values()) v = u(rng);
  for (double& v : t.values()) v = u(rng);
  const auto gr = dice_backward(s, t);
  const auto fdr = fd_dice(s, t, 1e-6);
  for (std::size_t k = 0; k < gr.size(); ++k) EXPECT_NEAR(gr[k], fdr[k], 1e-8);
}

TEST(Backward, ZeroUpstreamGivesZero) {
  const std::vector<double> up(64, 0.0);
  const EndpointGradient g = backward({{1, 2}, {6, 5}}, {0, 0, 8}, RasterParams{}, up);
  EXPECT_EQ(g.d_ax, 0.0);
  EXPECT_EQ(g.d_ay, 0.0);
  EXPECT_EQ(g.d_bx, 0.0);
  EXPECT_EQ(g.d_by, 0.0);
}

TEST(Backward, MirrorSymmetry) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 8);
  const RasterParams params;
  const PatchRect rect{0, 0, 8};
  for (int k = 0; k < 20; ++k) {
    const LineSegment l{{u(rng), u(rng)}, {u(rng), u(rng)}};
    std::vector<double> up(64), up_m(64);
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) up[i * 8 + j] = u(rng) - 4;
    }
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) up_m[i * 8 + (7 - j)] = up[i * 8 + j];
    }
    const LineSegment m{{8 - l.a.x, l.a.y}, {8 - l.b.x, l.b.y}};
    const EndpointGradient g = backward(l, rect, params, up);
    const EndpointGradient gm = backward(m, rect, params, up_m);
    EXPECT_NEAR(gm.d_ax, -g.d_ax, 1e-10);
    EXPECT_NEAR(gm.d_ay, g.d_ay, 1e-10);
    EXPECT_NEAR(gm.d_bx, -g.d_bx, 1e-10);
    EXPECT_NEAR(gm.d_by, g.d_by, 1e-10);
  }
}

TEST(Backward, MatchesFiniteDifferencesAwayFromSwitch) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 8);
  std::uniform_real_distribution<double> w(-1, 1);
  const RasterParams params;
  const PatchRect rect{0, 0, 8};
  int checked = 0;
  for (int k = 0; k < 100; ++k) {
    const LineSegment l{{u(rng), u(rng)}, {u(rng), u(rng)}};
    if (l.length() < 0.5) continue;
    std::vector<double> up(64);
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        up[i * 8 + j] = oracle::near_regime_switch(l, {j + 0.5, i + 0.5}, 1e-3) ? 0.0 : w(rng);
      }
    }
    const EndpointGradient g = backward(l, rect, params, up);
    const auto fd = oracle::fd_patch_gradient(l, rect, params, up, 1e-4);
    const double a[4] = {g.d_ax, g.d_ay, g.d_bx, g.d_by};
    for (int c = 0; c < 4; ++c) {
      EXPECT_LT(std::abs(a[c] - fd[c]) / std::max({std::abs(a[c]), std::abs(fd[c]), 1e-3}), 1e-4);
    }
    ++checked;
  }
  EXPECT_GT(checked, 80);
}

TEST(RasterParams, Validation) {
  EXPECT_THROW((RasterParams{0.0, 1.0, 10.0}.validate()), InvariantError);
  EXPECT_THROW((RasterParams{8.0, 2.0, 1.0}.validate()), InvariantError);
  EXPECT_NO_THROW(RasterParams{}.validate());
}

TEST(Preview, Rounds) {
  SoftMask m(2, 1, std::vector<double>{0.5, 1.0});
  const auto bytes = to_preview_bytes(m);
  EXPECT_EQ(bytes[0], 128);
  EXPECT_EQ(bytes[1], 255);
}
