#include "palis/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "palis/error.hpp"
#include "palis/parallel.hpp"
#include "palis/simd/kernels.hpp"

namespace palis {

void RasterParams::validate() const {
  if (!(tau_inv > 0.0)) throw InvariantError("tau_inv must be positive");
  if (!(t_in >= 0.0)) throw InvariantError("t_in must be non-negative");
  if (!(t_out >= t_in)) throw InvariantError("t_out must be at least t_in");
}

SoftMask::SoftMask(int width, int height, double fill)
    : width_(width), height_(height), values_(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), fill) {}

SoftMask::SoftMask(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {}

double SoftMask::sum() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

void SoftMask::validate() const {
  if (width_ <= 0 || height_ <= 0) throw InvariantError("mask dimensions must be positive");
  if (values_.size() != static_cast<std::size_t>(width_) * height_) {
    throw InvariantError("mask holds " + std::to_string(values_.size()) + " values, expected " +
                         std::to_string(static_cast<std::size_t>(width_) * height_));
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!(values_[k] >= 0.0 && values_[k] <= 1.0)) {
      throw InvariantError("mask value at index " + std::to_string(k) + " outside [0, 1]");
    }
  }
}

namespace {

simd::PatchArgs patch_args(const LineSegment& l, const PatchRect& rect, const RasterParams& params) {
  const Point o = rect.origin();
  return {l.a.x, l.a.y, l.b.x, l.b.y, o.x, o.y, rect.size, 1.0 / params.tau_inv, params.t_in, params.t_out};
}

void check_same_shape(const SoftMask& s, const SoftMask& target) {
  if (s.width() != target.width() || s.height() != target.height()) {
    throw UsageError("mask dimensions differ: " + std::to_string(s.width()) + "x" + std::to_string(s.height()) +
                     " vs " + std::to_string(target.width()) + "x" + std::to_string(target.height()));
  }
}

}  // namespace

std::vector<double> rasterize_patch(const LineSegment& l, const PatchRect& rect, const RasterParams& params) {
  std::vector<double> out(static_cast<std::size_t>(rect.size) * rect.size);
  simd::active().raster_forward(patch_args(l, rect, params), out.data());
  return out;
}

SoftMask compose_soft_mask(const PatchGrid& grid, const RasterParams& params) {
  params.validate();
  SoftMask mask(grid.width(), grid.height());
  const std::vector<std::size_t> cells = grid.i_cells();
  const int p = grid.patch_size();
  const simd::Kernels& k = simd::active();
  parallel_for(cells.size(), [&](std::size_t n) {
    const int row = static_cast<int>(cells[n]) / grid.cols();
    const int col = static_cast<int>(cells[n]) % grid.cols();
    const PatchRect rect = grid.rect(row, col);
    std::vector<double> patch(static_cast<std::size_t>(p) * p);
    k.raster_forward(patch_args(*grid.at(row, col).segment, rect, params), patch.data());
    for (int i = 0; i < p; ++i) {
      std::copy_n(patch.begin() + static_cast<std::ptrdiff_t>(i) * p, p,
                  mask.values().begin() + static_cast<std::ptrdiff_t>(mask.index(row * p + i, col * p)));
    }
  });
  return mask;
}

SoftMask render_centerline_mask(const RoadGraph& g, int width, int height) {
  SoftMask mask(width, height);
  for (const Edge& e : g.edges) {
    const LineSegment seg = g.edge_segment(e);
    const int x_lo = std::max(0, static_cast<int>(std::floor(std::min(seg.a.x, seg.b.x) - 1.0)));
    const int x_hi = std::min(width - 1, static_cast<int>(std::ceil(std::max(seg.a.x, seg.b.x) + 1.0)));
    const int y_lo = std::max(0, static_cast<int>(std::floor(std::min(seg.a.y, seg.b.y) - 1.0)));
    const int y_hi = std::min(height - 1, static_cast<int>(std::ceil(std::max(seg.a.y, seg.b.y) + 1.0)));
    for (int i = y_lo; i <= y_hi; ++i) {
      for (int j = x_lo; j <= x_hi; ++j) {
        if (point_segment_distance({j + 0.5, i + 0.5}, seg) <= 0.5) mask.at(i, j) = 1.0;
      }
    }
  }
  return mask;
}

double dice_loss(const SoftMask& s, const SoftMask& target) {
  check_same_shape(s, target);
  const simd::DiceSums sums = simd::active().dice_sums(s.values().data(), target.values().data(), s.size());
  const double numer = 2.0 * sums.overlap + kDiceEpsilon;
  const double denom = sums.pred_sq + sums.target_sq + kDiceEpsilon;
  return 1.0 - numer / denom;
}

std::vector<double> dice_backward(const SoftMask& s, const SoftMask& target) {
  check_same_shape(s, target);
  const simd::Kernels& k = simd::active();
  const simd::DiceSums sums = k.dice_sums(s.values().data(), target.values().data(), s.size());
  const double numer = 2.0 * sums.overlap + kDiceEpsilon;
  const double denom = sums.pred_sq + sums.target_sq + kDiceEpsilon;
  std::vector<double> grad(s.size());
  k.dice_gradient(s.values().data(), target.values().data(), s.size(), numer, denom, grad.data());
  return grad;
}

EndpointGradient backward(const LineSegment& l, const PatchRect& rect, const RasterParams& params,
                          std::span<const double> upstream) {
  if (upstream.size() != static_cast<std::size_t>(rect.size) * rect.size) {
    throw UsageError("upstream gradient must cover the p*p footprint");
  }
  double g[4];
  simd::active().raster_backward(patch_args(l, rect, params), upstream.data(), g);
  return {g[0], g[1], g[2], g[3]};
}

std::vector<EndpointGradient> grid_backward(const PatchGrid& grid, const RasterParams& params,
                                            std::span<const double> upstream) {
  if (upstream.size() != static_cast<std::size_t>(grid.width()) * grid.height()) {
    throw UsageError("upstream gradient must cover the whole image");
  }
  std::vector<EndpointGradient> out(grid.cell_count());
  const std::vector<std::size_t> cells = grid.i_cells();
  const int p = grid.patch_size();
  const simd::Kernels& k = simd::active();
  parallel_for(cells.size(), [&](std::size_t n) {
    const int row = static_cast<int>(cells[n]) / grid.cols();
    const int col = static_cast<int>(cells[n]) % grid.cols();
    std::vector<double> local(static_cast<std::size_t>(p) * p);
    for (int i = 0; i < p; ++i) {
      const std::size_t src = static_cast<std::size_t>(row * p + i) * grid.width() + static_cast<std::size_t>(col) * p;
      std::copy_n(upstream.begin() + static_cast<std::ptrdiff_t>(src), p,
                  local.begin() + static_cast<std::ptrdiff_t>(i) * p);
    }
    double g[4];
    k.raster_backward(patch_args(*grid.at(row, col).segment, grid.rect(row, col), params), local.data(), g);
    out[cells[n]] = {g[0], g[1], g[2], g[3]};
  });
  return out;
}

std::vector<std::uint8_t> to_preview_bytes(const SoftMask& mask) {
  std::vector<std::uint8_t> bytes(mask.size());
  const auto values = mask.values();
  for (std::size_t k = 0; k < bytes.size(); ++k) {
    bytes[k] = static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(values[k], 0.0, 1.0)));
  }
  return bytes;
}

}  // namespace palis
