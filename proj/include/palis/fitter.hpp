#pragma once

// Direct optimization of I-cell segment endpoints, either against a target
// mask through the soft rasterizer and DICE loss, or against vector labels
// under an L1 loss.

#include <cstdint>
#include <optional>
#include <vector>

#include "palis/patch_grid.hpp"
#include "palis/raster.hpp"

namespace palis {

enum class Optimizer { GradientDescent, Momentum };

struct FitConfig {
  /// Step length in pixels. For mask supervision the gradient is scaled so
  /// that the first step moves the steepest coordinate by exactly this much.
  double learning_rate = 0.25;
  int max_iters = 500;
  /// Stop once an accepted step changes the loss by less than this.
  double tol = 1e-12;
  Optimizer optimizer = Optimizer::GradientDescent;
  double momentum = 0.9;
  RasterParams raster;

  void validate() const;
};

struct FitReport {
  /// Loss at the start of each iteration; size() == iterations.
  std::vector<double> loss_trace;
  double final_loss = 0.0;
  int iterations = 0;
  /// Gradient-descent steps rejected for increasing the loss.
  int rejected_steps = 0;
  /// Filled when a reference grid is supplied.
  std::optional<double> mean_endpoint_error;
  std::vector<double> cell_endpoint_error;
};

struct FitResult {
  PatchGrid grid;
  FitReport report;
};

/// Mask-supervised fit. Only I-cell endpoints move; each is clamped to its
/// cell footprint after every step. Throws UsageError when the target does
/// not match the grid dimensions.
FitResult fit_palis(const PatchGrid& init, const SoftMask& target, const FitConfig& cfg,
                    const PatchGrid* reference = nullptr);

/// Endpoint order with the smaller x first, ties by smaller y.
LineSegment canonicalize_segment(const LineSegment& l);

double l1_vector_loss(const LineSegment& pred, const LineSegment& label, bool sorted);

enum class VectorSupervision { Unsorted, Sorted };

/// Label-supervised fit. Every coordinate moves toward its label by
/// min(learning_rate, |difference|) per iteration. In Unsorted mode the
/// label orientation is redrawn at random for every cell and iteration.
/// Throws UsageError when the class maps differ.
FitResult fit_vector_supervised(const PatchGrid& init, const PatchGrid& labels, VectorSupervision mode,
                                const FitConfig& cfg, std::uint64_t seed = 0);

/// Mean distance between matched endpoints, minimized over the two
/// endpoint pairings.
double endpoint_error(const LineSegment& fitted, const LineSegment& reference);

/// Mean endpoint_error over I-cells present in both grids.
double mean_endpoint_error(const PatchGrid& fitted, const PatchGrid& reference,
                           std::vector<double>* per_cell = nullptr);

/// Same classes as `classes`; every I-cell gets a horizontal segment of
/// length p/2 centered in the cell.
PatchGrid default_initialization(const PatchGrid& classes);

}  // namespace palis
