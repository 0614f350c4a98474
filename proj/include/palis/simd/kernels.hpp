#pragma once

// Data-parallel inner loops of the rasterizer and the DICE loss. Each
// instruction set provides the same table of kernels; the scalar table is
// the reference every other table is equivalence-tested against.

#include <cstddef>
#include <string_view>

namespace palis::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// One segment rasterized into one square patch.
struct PatchArgs {
  double ax, ay, bx, by;  // segment endpoints, image frame
  double x0, y0;          // patch origin (top-left corner)
  int size;               // patch side p; output is p*p values row-major
  double inv_tau;         // 1 / tau_inv
  double t_in;            // projection factor where the foot lies on the segment
  double t_out;           // projection factor elsewhere
};

struct DiceSums {
  double overlap = 0.0;       // sum s * t
  double pred_sq = 0.0;       // sum s^2
  double target_sq = 0.0;     // sum t^2
};

struct Kernels {
  Isa isa;
  /// out[i * size + j] = exp(-d^2 * t * inv_tau) at pixel center (j + .5, i + .5).
  void (*raster_forward)(const PatchArgs& args, double* out);
  /// grad[0..3] = d/d(ax, ay, bx, by) of sum upstream * C, with the
  /// projection-factor regime held fixed per pixel.
  void (*raster_backward)(const PatchArgs& args, const double* upstream, double* grad);
  DiceSums (*dice_sums)(const double* pred, const double* target, std::size_t n);
  /// out = d/d(pred) of 1 - numer / denom, where numer = 2 overlap + eps and
  /// denom = pred_sq + target_sq + eps.
  void (*dice_gradient)(const double* pred, const double* target, std::size_t n, double numer, double denom,
                        double* out);
};

bool is_available(Isa isa);
/// Throws std::invalid_argument when `isa` is not available on this CPU.
const Kernels& kernels_for(Isa isa);

/// Kernels used by the library. Defaults to the widest available table;
/// the PALIS_SIMD environment variable ("scalar" or "avx2") overrides.
const Kernels& active();
void set_active(Isa isa);

}  // namespace palis::simd
