#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qcr/ambient.hpp"
#include "qcr/finite_diff.hpp"
#include "qcr/tensor.hpp"

namespace qcr {

enum class Distribution { D, Dperp };

std::string_view to_string(Distribution d) noexcept;

struct Box {
  Vec lo;
  Vec hi;

  int dim() const noexcept { return static_cast<int>(lo.size()); }
  /// Distance from u to the nearest face (negative outside).
  double margin(const Vec& u) const;
};

/// A sub-chart whose image is the leaf of `which` through a chart point.
///
/// `to_chart(base, v)` maps leaf coordinates v (with v = 0 at the base point)
/// into chart coordinates of the parent submanifold. Coordinate leaves also
/// record their `axes` so they can be written back to a scenario file.
struct LeafChart {
  Distribution which;
  int dim;
  std::function<Vec(const Vec& base, const Vec& v)> to_chart;
  std::vector<int> axes;
};

LeafChart coordinate_leaf(Distribution which, std::vector<int> axes);

/// Chart map u in a box of R^k into R^{4m}, plus the points it is sampled at.
struct ChartedSubmanifold {
  std::string name;
  int k = 0;
  int ambient_dim = 0;
  Box domain;
  std::function<Vec(const Vec&)> eval;
  std::vector<Vec> sample_points;
  std::vector<LeafChart> leaf_charts;
  /// Replaces the computed totally real distribution by the span of these
  /// chart vectors (k x r). Only test fixtures set it.
  std::function<Mat(const Vec&)> dperp_override;

  /// Evaluates the chart and rejects non-finite output.
  Vec operator()(const Vec& u) const;
  const LeafChart* leaf(Distribution which) const;
};

/// Sub-chart through `base` whose image is the leaf described by `leaf`.
ChartedSubmanifold leaf_submanifold(const ChartedSubmanifold& sub, const LeafChart& leaf, const Vec& base, double half_width);

/// Central-difference Jacobian (4m x k); columns are the coordinate fields.
Mat jacobian(const ChartedSubmanifold& sub, const Vec& u, const FdScheme& scheme = {});

/// Jacobian plus the QR split of R^{4m} into tangent and normal bases.
struct TangentFrame {
  Mat jac;
  Mat tangent;  // 4m x k, orthonormal
  Mat normal;   // 4m x (4m - k), orthonormal
  Mat metric;   // k x k
};

TangentFrame tangent_frame(const ChartedSubmanifold& sub, const Vec& u, const FdScheme& scheme = {});
TangentFrame tangent_frame_from_jacobian(Mat jac);

struct PointGeometry {
  Vec u;
  Mat jac;
  Mat tangent_basis;
  Mat normal_basis;
  Mat induced_metric;
  Mat inverse_metric;
  /// christoffel(l, i, j) = Gamma^l_ij of the induced Levi-Civita connection.
  Tensor3 christoffel;
  /// B(i, j, a): component of B(d_i, d_j) along normal_basis column a.
  Tensor3 B;

  int k() const noexcept { return static_cast<int>(jac.cols()); }
  int ambient_dim() const noexcept { return static_cast<int>(jac.rows()); }

  Mat tangent_projector() const { return tangent_basis * tangent_basis.transpose(); }
  Mat normal_projector() const { return normal_basis * normal_basis.transpose(); }

  /// Coordinates of a tangent vector in the coordinate basis d_i f.
  Vec chart_coords(const Vec& X) const;
  /// B(d_i, d_j) as an ambient vector.
  Vec second_form_coord(int i, int j) const;
  /// B(X, Y) as an ambient (normal) vector for ambient tangent X, Y.
  Vec second_form(const Vec& X, const Vec& Y) const;
  /// Normal component of an ambient vector is at most tol * |v|.
  bool is_tangent(const Vec& v, double tol = 1e-8) const;
};

PointGeometry point_geometry(const ChartedSubmanifold& sub, const AmbientSpace& space, const Vec& u, const FdScheme& scheme = {});

struct ShapeOperatorValue {
  Vec N;
  /// A_N in the orthonormal tangent basis of the point geometry.
  Mat matrix;
};

ShapeOperatorValue shape_operator(const PointGeometry& pg, const Vec& N);

/// A_N X as an ambient tangent vector.
Vec apply_shape_operator(const PointGeometry& pg, const Vec& N, const Vec& X);

struct NormalDerivative {
  Vec flat;         // directional derivative of the field in R^{4m}
  Vec tangential;   // equals -A_N X
  Vec nabla_perp;   // normal connection
};

using ChartVectorField = std::function<Vec(const Vec& u)>;

/// Weingarten split of the derivative of a normal field along d_direction.
NormalDerivative normal_connection(const ChartedSubmanifold& sub, const AmbientSpace& space, const Vec& u,
                                   const ChartVectorField& N_field, int direction, const FdScheme& scheme = {});

/// Same split along the chart direction sum_i a_i d_i.
NormalDerivative normal_connection_along(const ChartedSubmanifold& sub, const AmbientSpace& space, const Vec& u,
                                         const ChartVectorField& N_field, const Vec& a, const FdScheme& scheme = {});

/// Induced metric from a fourth-order Jacobian at `step`; used by the
/// curvature stencils.
Mat accurate_metric(const ChartedSubmanifold& sub, const Vec& u, double step);

/// Rm(i, j, k, l) = g(R(d_i, d_j) d_k, d_l) from the metric and its first two
/// derivatives.
Tensor4 riemann_tensor(const ChartedSubmanifold& sub, const Vec& u, const FdScheme& scheme = {});

/// Riemann tensor contracted with ambient tangent vectors at a point.
double riemann_value(const Tensor4& Rm, const PointGeometry& pg, const Vec& X, const Vec& Y, const Vec& Z, const Vec& U);

/// |R-bar - R - <B(X,Z),B(Y,U)> + <B(Y,Z),B(X,U)>| with R-bar = 0.
double gauss_equation_residual(const ChartedSubmanifold& sub, const AmbientSpace& space, const Vec& u, const Vec& X,
                               const Vec& Y, const Vec& Z, const Vec& U, const FdScheme& scheme = {});

/// Worst Gauss-equation residual over all orthonormal tangent basis tuples.
double gauss_equation_residual_all(const PointGeometry& pg, const Tensor4& Rm);

}  // namespace qcr
