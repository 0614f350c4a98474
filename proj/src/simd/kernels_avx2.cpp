// AVX2 + FMA variants of the raster and DICE kernels. This translation unit
// is compiled with -mavx2 -mfma; nothing here runs unless the dispatcher has
// confirmed CPU support.

#include "simd/kernels_internal.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include "simd/pixel.hpp"

namespace palis::simd {

namespace {

// exp(x) for x <= 0, Cephes rational approximation on [-ln2/2, ln2/2]
// followed by exponent reconstruction. Inputs below the smallest normal
// result flush to zero.
inline __m256d exp_nonpositive(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.3964185322641);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lo);

  const __m256d fx = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                                     _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  x = _mm256_fnmadd_pd(fx, _mm256_set1_pd(6.93145751953125e-1), x);
  x = _mm256_fnmadd_pd(fx, _mm256_set1_pd(1.42860682030941723212e-6), x);

  const __m256d xx = _mm256_mul_pd(x, x);
  __m256d px = _mm256_fmadd_pd(_mm256_set1_pd(1.26177193074810590878e-4), xx,
                               _mm256_set1_pd(3.02994407707441961300e-2));
  px = _mm256_fmadd_pd(px, xx, _mm256_set1_pd(9.99999999999999999910e-1));
  px = _mm256_mul_pd(px, x);
  __m256d qx = _mm256_fmadd_pd(_mm256_set1_pd(3.00198505138664455042e-6), xx,
                               _mm256_set1_pd(2.52448340349684104192e-3));
  qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(2.27265548208155028766e-1));
  qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(2.00000000000000000009e0));

  __m256d r = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  r = _mm256_fmadd_pd(_mm256_set1_pd(2.0), r, _mm256_set1_pd(1.0));

  const __m256i n = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(fx));
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(n, _mm256_set1_epi64x(1023)), 52);
  r = _mm256_mul_pd(r, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(underflow, r);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Per-lane geometry of one run of four pixel centers along a row.
struct Lanes {
  __m256d wx, wy, ux, uy;
  __m256d c;
  __m256d before, beyond;  // regime masks
  __m256d d2, t;
};

struct SegmentConsts {
  __m256d ax, ay, bx, by, dx, dy, len2, t_in, t_out;
};

inline SegmentConsts segment_consts(const PatchArgs& a) {
  const double dx = a.bx - a.ax;
  const double dy = a.by - a.ay;
  return {_mm256_set1_pd(a.ax),          _mm256_set1_pd(a.ay), _mm256_set1_pd(a.bx),
          _mm256_set1_pd(a.by),          _mm256_set1_pd(dx),   _mm256_set1_pd(dy),
          _mm256_set1_pd(dx * dx + dy * dy), _mm256_set1_pd(a.t_in), _mm256_set1_pd(a.t_out)};
}

inline Lanes lanes_at(const SegmentConsts& k, __m256d qx, __m256d qy) {
  Lanes l;
  l.wx = _mm256_sub_pd(qx, k.ax);
  l.wy = _mm256_sub_pd(qy, k.ay);
  l.ux = _mm256_sub_pd(qx, k.bx);
  l.uy = _mm256_sub_pd(qy, k.by);
  const __m256d s =
      _mm256_div_pd(_mm256_add_pd(_mm256_mul_pd(l.wx, k.dx), _mm256_mul_pd(l.wy, k.dy)), k.len2);
  l.before = _mm256_cmp_pd(s, _mm256_setzero_pd(), _CMP_LT_OQ);
  l.beyond = _mm256_cmp_pd(s, _mm256_set1_pd(1.0), _CMP_GT_OQ);
  l.c = _mm256_sub_pd(_mm256_mul_pd(l.wx, k.dy), _mm256_mul_pd(l.wy, k.dx));

  const __m256d d2_inside = _mm256_div_pd(_mm256_mul_pd(l.c, l.c), k.len2);
  const __m256d d2_a = _mm256_add_pd(_mm256_mul_pd(l.wx, l.wx), _mm256_mul_pd(l.wy, l.wy));
  const __m256d d2_b = _mm256_add_pd(_mm256_mul_pd(l.ux, l.ux), _mm256_mul_pd(l.uy, l.uy));
  l.d2 = _mm256_blendv_pd(_mm256_blendv_pd(d2_inside, d2_a, l.before), d2_b, l.beyond);
  l.t = _mm256_blendv_pd(k.t_in, k.t_out, _mm256_or_pd(l.before, l.beyond));
  return l;
}

inline __m256d column_offsets(double x0, int j) {
  return _mm256_add_pd(_mm256_set1_pd(x0 + j + 0.5), _mm256_setr_pd(0.0, 1.0, 2.0, 3.0));
}

void raster_forward(const PatchArgs& args, double* out) {
  if (args.size <= 0) return;
  const double dx = args.bx - args.ax;
  const double dy = args.by - args.ay;
  if (dx * dx + dy * dy <= detail::kDegenerateLength2) {
    scalar_kernels().raster_forward(args, out);
    return;
  }
  const SegmentConsts k = segment_consts(args);
  const __m256d neg_inv_tau = _mm256_set1_pd(-args.inv_tau);
  for (int i = 0; i < args.size; ++i) {
    const double qy_s = args.y0 + i + 0.5;
    const __m256d qy = _mm256_set1_pd(qy_s);
    double* row = out + static_cast<std::ptrdiff_t>(i) * args.size;
    int j = 0;
    for (; j + 4 <= args.size; j += 4) {
      const Lanes l = lanes_at(k, column_offsets(args.x0, j), qy);
      const __m256d arg = _mm256_mul_pd(_mm256_mul_pd(l.d2, l.t), neg_inv_tau);
      _mm256_storeu_pd(row + j, exp_nonpositive(arg));
    }
    for (; j < args.size; ++j) row[j] = detail::pixel_value(args, args.x0 + j + 0.5, qy_s);
  }
}

void raster_backward(const PatchArgs& args, const double* upstream, double* grad) {
  grad[0] = grad[1] = grad[2] = grad[3] = 0.0;
  if (args.size <= 0) return;
  const double dx = args.bx - args.ax;
  const double dy = args.by - args.ay;
  if (dx * dx + dy * dy <= detail::kDegenerateLength2) {
    scalar_kernels().raster_backward(args, upstream, grad);
    return;
  }
  const SegmentConsts k = segment_consts(args);
  const __m256d neg_inv_tau = _mm256_set1_pd(-args.inv_tau);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d neg_two = _mm256_set1_pd(-2.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d len2_sq = _mm256_mul_pd(k.len2, k.len2);
  __m256d acc0 = zero, acc1 = zero, acc2 = zero, acc3 = zero;
  double tail[4] = {0.0, 0.0, 0.0, 0.0};

  for (int i = 0; i < args.size; ++i) {
    const double qy_s = args.y0 + i + 0.5;
    const __m256d qy = _mm256_set1_pd(qy_s);
    const double* up_row = upstream + static_cast<std::ptrdiff_t>(i) * args.size;
    int j = 0;
    for (; j + 4 <= args.size; j += 4) {
      const __m256d qx = column_offsets(args.x0, j);
      const Lanes l = lanes_at(k, qx, qy);
      const __m256d kk = _mm256_mul_pd(l.t, neg_inv_tau);
      const __m256d value = exp_nonpositive(_mm256_mul_pd(kk, l.d2));
      const __m256d g = _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(up_row + j), value), kk);

      // Inside the projection: d2 = c^2 / len2.
      const __m256d f = _mm256_div_pd(_mm256_mul_pd(two, l.c), k.len2);
      const __m256d h = _mm256_div_pd(_mm256_sub_pd(zero, _mm256_mul_pd(l.c, l.c)), len2_sq);
      const __m256d h_dx = _mm256_mul_pd(_mm256_mul_pd(two, h), k.dx);
      const __m256d h_dy = _mm256_mul_pd(_mm256_mul_pd(two, h), k.dy);
      const __m256d in_ax = _mm256_sub_pd(_mm256_mul_pd(f, _mm256_sub_pd(qy, k.by)), h_dx);
      const __m256d in_ay = _mm256_sub_pd(_mm256_mul_pd(f, _mm256_sub_pd(k.bx, qx)), h_dy);
      const __m256d in_bx = _mm256_add_pd(_mm256_mul_pd(f, _mm256_sub_pd(zero, l.wy)), h_dx);
      const __m256d in_by = _mm256_add_pd(_mm256_mul_pd(f, l.wx), h_dy);

      const __m256d outside = _mm256_or_pd(l.before, l.beyond);
      const __m256d d_ax =
          _mm256_blendv_pd(in_ax, _mm256_and_pd(l.before, _mm256_mul_pd(neg_two, l.wx)), outside);
      const __m256d d_ay =
          _mm256_blendv_pd(in_ay, _mm256_and_pd(l.before, _mm256_mul_pd(neg_two, l.wy)), outside);
      const __m256d d_bx =
          _mm256_blendv_pd(in_bx, _mm256_and_pd(l.beyond, _mm256_mul_pd(neg_two, l.ux)), outside);
      const __m256d d_by =
          _mm256_blendv_pd(in_by, _mm256_and_pd(l.beyond, _mm256_mul_pd(neg_two, l.uy)), outside);

      acc0 = _mm256_fmadd_pd(g, d_ax, acc0);
      acc1 = _mm256_fmadd_pd(g, d_ay, acc1);
      acc2 = _mm256_fmadd_pd(g, d_bx, acc2);
      acc3 = _mm256_fmadd_pd(g, d_by, acc3);
    }
    for (; j < args.size; ++j) {
      detail::accumulate_pixel_gradient(args, args.x0 + j + 0.5, qy_s, up_row[j], tail);
    }
  }
  grad[0] = hsum(acc0) + tail[0];
  grad[1] = hsum(acc1) + tail[1];
  grad[2] = hsum(acc2) + tail[2];
  grad[3] = hsum(acc3) + tail[3];
}

DiceSums dice_sums(const double* pred, const double* target, std::size_t n) {
  __m256d st = _mm256_setzero_pd();
  __m256d ss = _mm256_setzero_pd();
  __m256d tt = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d s = _mm256_loadu_pd(pred + k);
    const __m256d t = _mm256_loadu_pd(target + k);
    st = _mm256_fmadd_pd(s, t, st);
    ss = _mm256_fmadd_pd(s, s, ss);
    tt = _mm256_fmadd_pd(t, t, tt);
  }
  DiceSums out{hsum(st), hsum(ss), hsum(tt)};
  for (; k < n; ++k) {
    out.overlap += pred[k] * target[k];
    out.pred_sq += pred[k] * pred[k];
    out.target_sq += target[k] * target[k];
  }
  return out;
}

void dice_gradient(const double* pred, const double* target, std::size_t n, double numer, double denom,
                   double* out) {
  const double inv_d2 = 1.0 / (denom * denom);
  const __m256d a = _mm256_set1_pd(-2.0 * denom * inv_d2);  // coefficient on target
  const __m256d b = _mm256_set1_pd(2.0 * numer * inv_d2);   // coefficient on pred
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d v = _mm256_fmadd_pd(a, _mm256_loadu_pd(target + k), _mm256_mul_pd(b, _mm256_loadu_pd(pred + k)));
    _mm256_storeu_pd(out + k, v);
  }
  for (; k < n; ++k) out[k] = -(2.0 * target[k] * denom - numer * 2.0 * pred[k]) * inv_d2;
}

}  // namespace

const Kernels* avx2_kernels() {
  static const Kernels table{Isa::Avx2, raster_forward, raster_backward, dice_sums, dice_gradient};
  return &table;
}

}  // namespace palis::simd

#else

namespace palis::simd {
const Kernels* avx2_kernels() { return nullptr; }
}  // namespace palis::simd

#endif
