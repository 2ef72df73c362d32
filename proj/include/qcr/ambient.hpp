#pragma once

#include <array>
#include <functional>

#include "qcr/quatlin.hpp"

namespace qcr {

/// Connection 1-forms of the structure bundle in the canonical basis.
///
/// The flat model uses the constant triple, so the forms are pinned to zero.
/// They are kept as covectors so that the derivative of J_alpha can be written
/// in the general form.
struct ConnectionForms {
  std::array<Vec, 3> covectors;

  double operator()(int alpha, const Vec& X) const;
};

/// Flat H^m with its Euclidean metric and canonical triple. `c` is only read
/// by the space-form curvature evaluator.
struct AmbientSpace {
  int m;
  QuaternionTriple triple;
  ConnectionForms omega;
  double c;

  int dim() const noexcept { return 4 * m; }
  double metric(const Vec& X, const Vec& Y) const;
};

AmbientSpace make_flat_space(int m, double c = 0.0);

/// Covariant derivative of J_alpha along X: a combination of the other two
/// structure operators weighted by the connection forms.
Mat structure_derivative(const AmbientSpace& space, int alpha, const Vec& X);

struct CurvatureValue {
  double value;
  std::array<Vec, 4> inputs;
};

/// g(R(X,Y)Z, U) for a quaternion space form of parameter `space.c`.
///
/// Convention: the bracketed formula is read as the definition of the
/// (X, Y, Z, U) slot order, so R(X,Y)Y paired with X gives the sectional
/// curvature of span{X, Y}.
CurvatureValue space_form_curvature(const AmbientSpace& space, const Vec& X, const Vec& Y, const Vec& Z, const Vec& U);

/// Curvature of the half-quaternion plane span{X, J_alpha X}; X must be unit.
double quaternion_sectional_curvature(const AmbientSpace& space, const Vec& X, int alpha);

using VectorField = std::function<Vec(const Vec&)>;

/// |g(R(X,Y)Z, U)| at `point`, with R assembled from nested central differences
/// of the flat connection. Requires c == 0.
double flat_curvature_numeric(const AmbientSpace& space, const VectorField& X, const VectorField& Y, const VectorField& Z,
                              const VectorField& U, const Vec& point, double step = 1e-3);

/// Constant-field overload.
double flat_curvature_numeric(const AmbientSpace& space, const Vec& X, const Vec& Y, const Vec& Z, const Vec& U);

}  // namespace qcr
