#pragma once

#include <algorithm>
#include <cmath>

#include "qcr/quatlin.hpp"

namespace qcr {

/// Step sizes for every finite-difference stencil in the engine.
///
/// `first_step` and `second_step` drive the chart Jacobian and Hessian.
/// Quantities that are themselves built from a Jacobian (metric, projected
/// frames) are differentiated with Richardson-extrapolated central differences
/// at `field_step`; the intrinsic curvature differentiates the metric twice
/// with fourth-order stencils at `curvature_step`.
struct FdScheme {
  double first_step = 1e-5;
  double second_step = 1e-4;
  double field_step = 1e-3;
  double curvature_step = 1e-2;
  bool richardson = false;

  /// Largest coordinate offset any stencil in the engine reaches.
  double reach() const {
    return std::max({2.0 * first_step, 2.0 * second_step, field_step + first_step, 2.0 * (curvature_step + field_step)});
  }

  bool operator==(const FdScheme&) const = default;
};

namespace fd {

inline Vec offset(const Vec& u, int axis, double h) {
  Vec v = u;
  v[axis] += h;
  return v;
}

/// Second-order central difference of F along `axis`.
template <class F>
auto central(F&& f, const Vec& u, int axis, double h) {
  using R = std::decay_t<decltype(f(u))>;
  R out = (f(offset(u, axis, h)) - f(offset(u, axis, -h))) / (2.0 * h);
  return out;
}

/// Fourth-order Richardson combination of central differences at h and h/2.
template <class F>
auto richardson(F&& f, const Vec& u, int axis, double h) {
  using R = std::decay_t<decltype(f(u))>;
  const R coarse = central(f, u, axis, h);
  const R fine = central(f, u, axis, 0.5 * h);
  R out = (4.0 * fine - coarse) / 3.0;
  return out;
}

template <class F>
auto first(F&& f, const Vec& u, int axis, double h, bool extrapolate) {
  return extrapolate ? richardson(f, u, axis, h) : central(f, u, axis, h);
}

/// Second-order second derivative d^2 F / du_i du_j.
template <class F>
auto second(F&& f, const Vec& u, int i, int j, double h) {
  using R = std::decay_t<decltype(f(u))>;
  if (i == j) {
    R out = (f(offset(u, i, h)) - 2.0 * f(u) + f(offset(u, i, -h))) / (h * h);
    return out;
  }
  auto at = [&](double si, double sj) {
    Vec v = u;
    v[i] += si * h;
    v[j] += sj * h;
    return f(v);
  };
  R out = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
  return out;
}

template <class F>
auto second_extrapolated(F&& f, const Vec& u, int i, int j, double h, bool extrapolate) {
  using R = std::decay_t<decltype(f(u))>;
  if (!extrapolate) return R(second(f, u, i, j, h));
  const R coarse = second(f, u, i, j, h);
  const R fine = second(f, u, i, j, 0.5 * h);
  R out = (4.0 * fine - coarse) / 3.0;
  return out;
}

/// Five-point fourth-order stencils, used where F is itself a derived quantity.
template <class F>
auto first4(F&& f, const Vec& u, int axis, double h) {
  using R = std::decay_t<decltype(f(u))>;
  R out = (-f(offset(u, axis, 2 * h)) + 8.0 * f(offset(u, axis, h)) - 8.0 * f(offset(u, axis, -h)) + f(offset(u, axis, -2 * h))) /
          (12.0 * h);
  return out;
}

template <class F>
auto second4(F&& f, const Vec& u, int i, int j, double h) {
  using R = std::decay_t<decltype(f(u))>;
  if (i == j) {
    R out = (-f(offset(u, i, 2 * h)) + 16.0 * f(offset(u, i, h)) - 30.0 * f(u) + 16.0 * f(offset(u, i, -h)) -
             f(offset(u, i, -2 * h))) /
            (12.0 * h * h);
    return out;
  }
  auto inner = [&](const Vec& v) -> R { return first4(f, v, j, h); };
  return R(first4(inner, u, i, h));
}

}  // namespace fd
}  // namespace qcr
