#pragma once

// Soft rasterization of patched segments, the DICE loss, and the analytic
// backward pass to segment endpoints.
//
// A segment l rasterizes into its own p x p footprint as
//
//     C(q) = exp(-d(q, l)^2 * t / tau_inv)
//
// where d is the distance from the pixel center q to the closed segment and
// t switches from t_in (foot of the perpendicular on the segment) to t_out
// (foot beyond an endpoint). t_out > t_in shortens the soft footprint along
// the segment; tau_inv widens it across.

#include <span>
#include <vector>

#include "palis/geometry.hpp"
#include "palis/patch_grid.hpp"
#include "palis/road_graph.hpp"

namespace palis {

struct RasterParams {
  double tau_inv = 8.0;
  double t_in = 1.0;
  double t_out = 10.0;

  /// Throws InvariantError unless tau_inv > 0 and t_out >= t_in >= 0.
  void validate() const;
};

/// Row-major scalar field with values in [0, 1].
class SoftMask {
 public:
  SoftMask() = default;
  SoftMask(int width, int height, double fill = 0.0);
  SoftMask(int width, int height, std::vector<double> values);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }

  double at(int row, int col) const { return values_[index(row, col)]; }
  double& at(int row, int col) { return values_[index(row, col)]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  std::size_t index(int row, int col) const { return static_cast<std::size_t>(row) * width_ + col; }
  double sum() const;

  /// Throws InvariantError on non-positive dimensions, size mismatch, or a
  /// value outside [0, 1].
  void validate() const;

  friend bool operator==(const SoftMask&, const SoftMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

struct EndpointGradient {
  double d_ax = 0.0;
  double d_ay = 0.0;
  double d_bx = 0.0;
  double d_by = 0.0;
};

/// p*p values of one segment over `rect`, row-major.
std::vector<double> rasterize_patch(const LineSegment& l, const PatchRect& rect, const RasterParams& params);

/// I-cells tile their own footprints; every other cell stays zero.
SoftMask compose_soft_mask(const PatchGrid& grid, const RasterParams& params);

/// Binary centerline mask: 1 where the pixel center lies within 0.5 px of
/// an edge.
SoftMask render_centerline_mask(const RoadGraph& g, int width, int height);

inline constexpr double kDiceEpsilon = 1.0;

/// 1 - (2 sum(s t) + eps) / (sum s^2 + sum t^2 + eps), eps = 1.
/// Throws UsageError on a dimension mismatch.
double dice_loss(const SoftMask& s, const SoftMask& target);

/// d(dice_loss)/d(s) per pixel.
std::vector<double> dice_backward(const SoftMask& s, const SoftMask& target);

/// Partials of sum(upstream * C) over the four endpoint coordinates, where
/// `upstream` covers the p*p footprint row-major.
EndpointGradient backward(const LineSegment& l, const PatchRect& rect, const RasterParams& params,
                          std::span<const double> upstream);

/// backward() for every I-cell given a full-image upstream gradient. The
/// result has one entry per cell (zero for non-I cells).
std::vector<EndpointGradient> grid_backward(const PatchGrid& grid, const RasterParams& params,
                                            std::span<const double> upstream);

/// 8-bit preview: round(255 * value) per pixel.
std::vector<std::uint8_t> to_preview_bytes(const SoftMask& mask);

}  // namespace palis
