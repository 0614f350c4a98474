#pragma once

// Per-pixel reference math shared by the scalar kernels and the scalar
// tails of the vector kernels.

#include <cmath>

#include "palis/simd/kernels.hpp"

namespace palis::simd::detail {

// Internal linkage: this header is also compiled into the AVX2 unit, whose
// copies must never be merged into scalar code paths.
namespace {

inline constexpr double kDegenerateLength2 = 1e-18;

enum class Regime { Inside, BeforeA, BeyondB, Degenerate };

struct PixelTerms {
  Regime regime;
  double d2;
  double t;
};

inline PixelTerms pixel_terms(const PatchArgs& a, double qx, double qy) {
  const double dx = a.bx - a.ax;
  const double dy = a.by - a.ay;
  const double len2 = dx * dx + dy * dy;
  const double wx = qx - a.ax;
  const double wy = qy - a.ay;
  if (len2 <= kDegenerateLength2) return {Regime::Degenerate, wx * wx + wy * wy, a.t_in};
  const double s = (wx * dx + wy * dy) / len2;
  if (s < 0.0) return {Regime::BeforeA, wx * wx + wy * wy, a.t_out};
  if (s > 1.0) {
    const double ux = qx - a.bx;
    const double uy = qy - a.by;
    return {Regime::BeyondB, ux * ux + uy * uy, a.t_out};
  }
  const double c = wx * dy - wy * dx;
  return {Regime::Inside, c * c / len2, a.t_in};
}

inline double pixel_value(const PatchArgs& a, double qx, double qy) {
  const PixelTerms p = pixel_terms(a, qx, qy);
  return std::exp(-p.d2 * p.t * a.inv_tau);
}

/// Adds upstream * dC/d(ax, ay, bx, by) at one pixel into grad.
inline void accumulate_pixel_gradient(const PatchArgs& a, double qx, double qy, double upstream, double* grad) {
  if (upstream == 0.0) return;
  const PixelTerms p = pixel_terms(a, qx, qy);
  const double k = -p.t * a.inv_tau;
  const double g = upstream * std::exp(k * p.d2) * k;  // d(sum)/d(d2)
  const double wx = qx - a.ax;
  const double wy = qy - a.ay;
  switch (p.regime) {
    case Regime::Degenerate:
    case Regime::BeforeA:
      grad[0] += g * (-2.0 * wx);
      grad[1] += g * (-2.0 * wy);
      return;
    case Regime::BeyondB:
      grad[2] += g * (-2.0 * (qx - a.bx));
      grad[3] += g * (-2.0 * (qy - a.by));
      return;
    case Regime::Inside: {
      const double dx = a.bx - a.ax;
      const double dy = a.by - a.ay;
      const double len2 = dx * dx + dy * dy;
      const double c = wx * dy - wy * dx;
      const double f = 2.0 * c / len2;              // d(d2)/dc
      const double h = -(c * c) / (len2 * len2);    // d(d2)/d(len2)
      grad[0] += g * (f * (qy - a.by) + h * (-2.0 * dx));
      grad[1] += g * (f * (a.bx - qx) + h * (-2.0 * dy));
      grad[2] += g * (f * (-wy) + h * (2.0 * dx));
      grad[3] += g * (f * wx + h * (2.0 * dy));
      return;
    }
  }
}

}  // namespace

}  // namespace palis::simd::detail
