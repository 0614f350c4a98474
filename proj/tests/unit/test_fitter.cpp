#include <gtest/gtest.h>

#include <random>

#include "generators.hpp"
#include "palis/codec.hpp"
#include "palis/error.hpp"
#include "palis/fitter.hpp"

using namespace palis;

namespace {

PatchGrid straight_road(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> y(12, 52);
  RoadGraph g;
  g.add_edge(g.add_vertex({0, y(rng)}), g.add_vertex({64, y(rng)}));
  return encode_graph(g, 64, 64, 8);
}

bool inside_cells(const PatchGrid& g) {
  for (std::size_t idx : g.i_cells()) {
    const int r = static_cast<int>(idx) / g.cols();
    const int c = static_cast<int>(idx) % g.cols();
    const LineSegment& l = *g.at(r, c).segment;
    if (!g.rect(r, c).contains(l.a) || !g.rect(r, c).contains(l.b)) return false;
  }
  return true;
}

}  // namespace

TEST(FitPalis, FixedPointAtGeneratingSegments) {
  std::mt19937_64 rng(1);
  const PatchGrid ref = straight_road(rng);
  const SoftMask target = compose_soft_mask(ref, {});
  FitConfig cfg;
  cfg.max_iters = 5;
  const FitResult res = fit_palis(ref, target, cfg, &ref);
  ASSERT_FALSE(res.report.loss_trace.empty());
  EXPECT_LT(res.report.loss_trace[0], 1e-6);
  EXPECT_LT(*res.report.mean_endpoint_error, 1e-6);
}

TEST(FitPalis, RecoversPerturbedRoad) {
  std::mt19937_64 rng(2);
  double total = 0.0;
  const int trials = 6;
  for (int k = 0; k < trials; ++k) {
    const PatchGrid ref = straight_road(rng);
    const PatchGrid init = gen::perturbed(ref, rng, 2.0);
    const FitResult res = fit_palis(init, compose_soft_mask(ref, {}), FitConfig{}, &ref);
    EXPECT_LE(res.report.iterations, 500);
    EXPECT_TRUE(inside_cells(res.grid));
    total += *res.report.mean_endpoint_error;
  }
  EXPECT_LT(total / trials, 1.0);
}

TEST(FitPalis, LossTraceMonotoneUnderGradientDescent) {
  std::mt19937_64 rng(3);
  const PatchGrid ref = straight_road(rng);
  const PatchGrid init = gen::perturbed(ref, rng, 2.0);
  FitConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.max_iters = 200;
  const FitResult res = fit_palis(init, compose_soft_mask(ref, {}), cfg);
  const auto& trace = res.report.loss_trace;
  for (std::size_t k = 1; k < trace.size(); ++k) EXPECT_LE(trace[k], trace[k - 1] + 1e-9);
  EXPECT_LE(res.report.final_loss, trace.back() + 1e-9);
}

TEST(FitPalis, MomentumKeepsEndpointsInCells) {
  std::mt19937_64 rng(4);
  const PatchGrid ref = straight_road(rng);
  FitConfig cfg;
  cfg.optimizer = Optimizer::Momentum;
  cfg.max_iters = 100;
  const FitResult res = fit_palis(gen::perturbed(ref, rng, 2.0), compose_soft_mask(ref, {}), cfg);
  EXPECT_TRUE(inside_cells(res.grid));
}

TEST(FitPalis, Deterministic) {
  std::mt19937_64 rng(5);
  const PatchGrid ref = straight_road(rng);
  const PatchGrid init = gen::perturbed(ref, rng, 2.0);
  const SoftMask target = compose_soft_mask(ref, {});
  EXPECT_EQ(fit_palis(init, target, FitConfig{}).grid, fit_palis(init, target, FitConfig{}).grid);
}

TEST(FitPalis, NoICellsAndErrors) {
  const PatchGrid empty(32, 32, 8);
  const FitResult res = fit_palis(empty, SoftMask(32, 32), FitConfig{});
  EXPECT_EQ(res.report.iterations, 0);
  EXPECT_THROW(fit_palis(empty, SoftMask(16, 32), FitConfig{}), UsageError);
  FitConfig bad;
  bad.learning_rate = 0.0;
  EXPECT_THROW(fit_palis(empty, SoftMask(32, 32), bad), InvariantError);
}

TEST(FitPalis, ProjectionFactorHelps) {
  // Same observed mask for both arms; only the model's projection factor differs.
  std::mt19937_64 rng(6);
  double with = 0.0, without = 0.0;
  for (std::uint64_t k = 0; k < 6; ++k) {
    const PatchGrid ref = gen::fit_trial_reference(k);
    const PatchGrid init = gen::perturbed(ref, rng, 2.0);
    const SoftMask target = compose_soft_mask(ref, {});
    FitConfig on;
    FitConfig off;
    off.raster.t_out = 1.0;
    with += *fit_palis(init, target, on, &ref).report.mean_endpoint_error;
    without += *fit_palis(init, target, off, &ref).report.mean_endpoint_error;
  }
  EXPECT_GT(without, with);
}

TEST(Canonicalize, Examples) {
  EXPECT_EQ(canonicalize_segment({{5, 1}, {2, 3}}), (LineSegment{{2, 3}, {5, 1}}));
  EXPECT_EQ(canonicalize_segment({{2, 3}, {5, 1}}), (LineSegment{{2, 3}, {5, 1}}));
  EXPECT_EQ(canonicalize_segment({{4, 7}, {4, 2}}), (LineSegment{{4, 2}, {4, 7}}));
}

TEST(L1VectorLoss, Examples) {
  const LineSegment l{{1, 2}, {3, 4}};
  EXPECT_EQ(l1_vector_loss(l, l, true), 0.0);
  EXPECT_EQ(l1_vector_loss({{0, 0}, {1, 0}}, {{1, 0}, {0, 0}}, true), 0.0);
  EXPECT_EQ(l1_vector_loss({{0, 0}, {1, 0}}, {{1, 0}, {0, 0}}, false), 2.0);
  EXPECT_EQ(l1_vector_loss({{0, 0}, {2, 0}}, {{0, 1}, {2, 1}}, true), 2.0);
  EXPECT_EQ(l1_vector_loss({{0, 0}, {2, 0}}, {{0, 1}, {2, 1}}, false), 2.0);
}

namespace {

// 1-D descent toward a fixed goal with step lr, coordinate by coordinate.
double descend(double x, double goal, double lr, int iters) {
  for (int k = 0; k < iters; ++k) {
    if (std::abs(goal - x) <= lr) return goal;
    x += goal > x ? lr : -lr;
  }
  return x;
}

}  // namespace

TEST(FitVectorSupervised, SortedConvergesToCanonicalLabel) {
  std::mt19937_64 rng(7);
  const PatchGrid labels = straight_road(rng);
  const PatchGrid init = gen::perturbed(labels, rng, 3.0);
  FitConfig cfg;
  cfg.max_iters = 200;
  const FitResult res = fit_vector_supervised(init, labels, VectorSupervision::Sorted, cfg);
  EXPECT_LT(*res.report.mean_endpoint_error, 1e-3);
  for (std::size_t idx : labels.i_cells()) {
    const int r = static_cast<int>(idx) / labels.cols();
    const int c = static_cast<int>(idx) % labels.cols();
    const LineSegment goal = canonicalize_segment(*labels.at(r, c).segment);
    const LineSegment start = canonicalize_segment(*init.at(r, c).segment);
    const LineSegment got = *res.grid.at(r, c).segment;
    EXPECT_NEAR(got.a.x, descend(start.a.x, goal.a.x, cfg.learning_rate, 200), 1e-12);
    EXPECT_NEAR(got.b.y, descend(start.b.y, goal.b.y, cfg.learning_rate, 200), 1e-12);
  }
}

TEST(FitVectorSupervised, UnsortedWorseThanSorted) {
  std::mt19937_64 rng(8);
  double sorted = 0.0, unsorted = 0.0;
  for (int k = 0; k < 100; ++k) {
    const PatchGrid labels = straight_road(rng);
    const PatchGrid init = gen::perturbed(labels, rng, 2.0);
    FitConfig cfg;
    cfg.max_iters = 100;
    sorted += *fit_vector_supervised(init, labels, VectorSupervision::Sorted, cfg, k).report.mean_endpoint_error;
    unsorted += *fit_vector_supervised(init, labels, VectorSupervision::Unsorted, cfg, k).report.mean_endpoint_error;
  }
  EXPECT_GT(unsorted, sorted);
}

TEST(FitVectorSupervised, ZeroIterationsAndMismatch) {
  std::mt19937_64 rng(9);
  const PatchGrid labels = straight_road(rng);
  const PatchGrid init = gen::perturbed(labels, rng, 2.0);
  FitConfig cfg;
  cfg.max_iters = 0;
  EXPECT_EQ(fit_vector_supervised(init, labels, VectorSupervision::Unsorted, cfg).grid, init);
  EXPECT_THROW(fit_vector_supervised(init, PatchGrid(64, 64, 8), VectorSupervision::Sorted, cfg), UsageError);
}

TEST(DefaultInitialization, CenteredHorizontal) {
  PatchGrid g(16, 16, 8);
  g.set_segment(1, 0, {{0, 12}, {8, 10}});
  g.set_junction(0, 1, PatchClass::X);
  const PatchGrid init = default_initialization(g);
  EXPECT_EQ(*init.at(1, 0).segment, (LineSegment{{2, 12}, {6, 12}}));
  EXPECT_EQ(init.at(0, 1).cls, PatchClass::X);
}

TEST(EndpointError, OrderInvariant) {
  EXPECT_DOUBLE_EQ(endpoint_error({{0, 0}, {4, 0}}, {{4, 0}, {0, 1}}), 0.5);
}
