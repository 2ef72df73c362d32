#include "qcr/ambient.hpp"

#include <cmath>
#include <vector>

#include "qcr/error.hpp"
#include "qcr/finite_diff.hpp"

namespace qcr {

double ConnectionForms::operator()(int alpha, const Vec& X) const {
  if (alpha < 1 || alpha > 3) throw Error(ErrorKind::Index, "connection form index must be in 1..3");
  return covectors[static_cast<std::size_t>(alpha - 1)].dot(X);
}

double AmbientSpace::metric(const Vec& X, const Vec& Y) const {
  if (X.size() != dim() || Y.size() != dim()) throw Error(ErrorKind::Shape, "metric: vector length does not match 4m");
  return X.dot(Y);
}

AmbientSpace make_flat_space(int m, double c) {
  QuaternionTriple triple = make_quaternion_triple(m);
  ConnectionForms omega{{Vec::Zero(4 * m), Vec::Zero(4 * m), Vec::Zero(4 * m)}};
  return AmbientSpace{m, std::move(triple), std::move(omega), c};
}

Mat structure_derivative(const AmbientSpace& space, int alpha, const Vec& X) {
  for (const EvenPermutation& p : kEvenPermutations) {
    if (p.alpha != alpha) continue;
    // nabla_X J_alpha = omega_gamma(X) J_beta - omega_beta(X) J_gamma
    return space.omega(p.gamma, X) * space.triple.J(p.beta) - space.omega(p.beta, X) * space.triple.J(p.gamma);
  }
  throw Error(ErrorKind::Index, "alpha must be in 1..3");
}

CurvatureValue space_form_curvature(const AmbientSpace& space, const Vec& X, const Vec& Y, const Vec& Z, const Vec& U) {
  const int n = space.dim();
  if (X.size() != n || Y.size() != n || Z.size() != n || U.size() != n)
    throw Error(ErrorKind::Shape, "space_form_curvature: vectors must lie in R^" + std::to_string(n));
  double bracket = Z.dot(Y) * X.dot(U) - X.dot(Z) * Y.dot(U);
  for (int a = 1; a <= 3; ++a) {
    const Mat& J = space.triple.J(a);
    const Vec JX = J * X;
    const Vec JY = J * Y;
    const Vec JZ = J * Z;
    bracket += Z.dot(JY) * JX.dot(U) - Z.dot(JX) * JY.dot(U) + 2.0 * X.dot(JY) * JZ.dot(U);
  }
  return CurvatureValue{0.25 * space.c * bracket, {X, Y, Z, U}};
}

double quaternion_sectional_curvature(const AmbientSpace& space, const Vec& X, int alpha) {
  if (X.size() != space.dim()) throw Error(ErrorKind::Shape, "quaternion_sectional_curvature: wrong vector length");
  if (std::abs(X.norm() - 1.0) > 1e-10) throw Error(ErrorKind::Normalization, "X must be a unit vector");
  const Vec JX = space.triple.J(alpha) * X;
  return space_form_curvature(space, X, JX, JX, X).value;
}

double flat_curvature_numeric(const AmbientSpace& space, const VectorField& X, const VectorField& Y, const VectorField& Z,
                              const VectorField& U, const Vec& point, double step) {
  if (space.c != 0.0) throw Error(ErrorKind::Inapplicable, "numeric curvature is only defined for the flat model (c = 0)");
  if (point.size() != space.dim()) throw Error(ErrorKind::Shape, "flat_curvature_numeric: point has wrong length");
  const double h = step;
  const int n = space.dim();
  auto jac = [h, n](const VectorField& W, const Vec& p) {
    Mat D(n, n);
    for (int i = 0; i < n; ++i) D.col(i) = fd::central(W, p, i, h);
    return D;
  };
  // Flat connection in Cartesian coordinates: nabla_V W = DW V and
  // nabla_V nabla_W Z = D^2 Z (V, W) + DZ (DW V).
  std::vector<Mat> hess(static_cast<std::size_t>(n), Mat::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const Vec d2 = fd::second(Z, point, i, j, h);
      for (int r = 0; r < n; ++r) hess[r](i, j) = hess[r](j, i) = d2[r];
    }
  auto second_form = [&](const Vec& V, const Vec& W) {
    Vec out(n);
    for (int r = 0; r < n; ++r) out[r] = V.dot(hess[r] * W);
    return out;
  };
  const Vec x = X(point), y = Y(point);
  const Mat DX = jac(X, point), DY = jac(Y, point), DZ = jac(Z, point);
  const Vec bracket = DY * x - DX * y;
  const Vec R = (second_form(x, y) + DZ * (DY * x)) - (second_form(y, x) + DZ * (DX * y)) - DZ * bracket;
  return std::abs(R.dot(U(point)));
}

double flat_curvature_numeric(const AmbientSpace& space, const Vec& X, const Vec& Y, const Vec& Z, const Vec& U) {
  auto constant = [](const Vec& v) -> VectorField { return [v](const Vec&) { return v; }; };
  return flat_curvature_numeric(space, constant(X), constant(Y), constant(Z), constant(U), Vec::Zero(space.dim()));
}

}  // namespace qcr
