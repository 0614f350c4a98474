#include "simd/kernels_internal.hpp"
#include "simd/pixel.hpp"

namespace palis::simd {

namespace {

void raster_forward(const PatchArgs& args, double* out) {
  for (int i = 0; i < args.size; ++i) {
    const double qy = args.y0 + i + 0.5;
    for (int j = 0; j < args.size; ++j) {
      out[i * args.size + j] = detail::pixel_value(args, args.x0 + j + 0.5, qy);
    }
  }
}

void raster_backward(const PatchArgs& args, const double* upstream, double* grad) {
  grad[0] = grad[1] = grad[2] = grad[3] = 0.0;
  for (int i = 0; i < args.size; ++i) {
    const double qy = args.y0 + i + 0.5;
    for (int j = 0; j < args.size; ++j) {
      detail::accumulate_pixel_gradient(args, args.x0 + j + 0.5, qy, upstream[i * args.size + j], grad);
    }
  }
}

DiceSums dice_sums(const double* pred, const double* target, std::size_t n) {
  DiceSums s;
  for (std::size_t k = 0; k < n; ++k) {
    s.overlap += pred[k] * target[k];
    s.pred_sq += pred[k] * pred[k];
    s.target_sq += target[k] * target[k];
  }
  return s;
}

void dice_gradient(const double* pred, const double* target, std::size_t n, double numer, double denom,
                   double* out) {
  const double inv_d2 = 1.0 / (denom * denom);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = -(2.0 * target[k] * denom - numer * 2.0 * pred[k]) * inv_d2;
  }
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels table{Isa::Scalar, raster_forward, raster_backward, dice_sums, dice_gradient};
  return table;
}

}  // namespace palis::simd
