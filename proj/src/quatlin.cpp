#include "qcr/quatlin.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qcr/error.hpp"

namespace qcr {

Eigen::Vector4d quaternion_product(const Eigen::Vector4d& p, const Eigen::Vector4d& q) {
  return {p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
          p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
          p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
          p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0]};
}

namespace {

Eigen::Matrix4d left_multiplication(int unit) {
  Eigen::Vector4d p = Eigen::Vector4d::Zero();
  p[unit] = 1.0;
  Eigen::Matrix4d L;
  for (int c = 0; c < 4; ++c) L.col(c) = quaternion_product(p, Eigen::Vector4d::Unit(c));
  return L;
}

}  // namespace

QuaternionTriple::QuaternionTriple(int m) : m_(m) {
  if (m < 1) throw Error(ErrorKind::InvalidDimension, "quaternion dimension must be >= 1, got " + std::to_string(m));
  for (int a = 0; a < 3; ++a) {
    const Eigen::Matrix4d block = left_multiplication(a + 1);
    J_[a] = Mat::Zero(4 * m, 4 * m);
    for (int f = 0; f < m; ++f) J_[a].block<4, 4>(4 * f, 4 * f) = block;
  }
}

const Mat& QuaternionTriple::J(int alpha) const {
  if (alpha < 1 || alpha > 3) throw Error(ErrorKind::Index, "alpha must be in 1..3, got " + std::to_string(alpha));
  return J_[alpha - 1];
}

QuaternionTriple make_quaternion_triple(int m) { return QuaternionTriple(m); }

Subspace::Subspace(int ambient_dim, Mat basis, double tol) : ambient_dim_(ambient_dim), basis_(std::move(basis)), tol_(tol) {
  if (basis_.rows() != ambient_dim_ && basis_.cols() > 0)
    throw Error(ErrorKind::Shape, "basis rows do not match ambient dimension");
  if (basis_.cols() == 0) basis_.resize(ambient_dim_, 0);
}

Subspace Subspace::zero(int ambient_dim, double tol) { return Subspace(ambient_dim, Mat(ambient_dim, 0), tol); }

Subspace Subspace::whole(int ambient_dim) { return Subspace(ambient_dim, Mat::Identity(ambient_dim, ambient_dim), 0.0); }

Mat Subspace::projector() const { return basis_ * basis_.transpose(); }

Vec Subspace::project(const Vec& v) const {
  if (v.size() != ambient_dim_) throw Error(ErrorKind::Shape, "vector length does not match subspace ambient dimension");
  return basis_ * (basis_.transpose() * v);
}

double Subspace::residual(const Vec& v) const { return (v - project(v)).norm(); }

Subspace orthonormalize(int ambient_dim, std::span<const Vec> vectors, double tol) {
  double largest = 0.0;
  for (const Vec& v : vectors) {
    if (v.size() != ambient_dim)
      throw Error(ErrorKind::Shape, "vector of length " + std::to_string(v.size()) + " in R^" + std::to_string(ambient_dim));
    largest = std::max(largest, v.norm());
  }
  std::vector<Vec> kept;
  const double cutoff = tol * largest;
  for (const Vec& v : vectors) {
    Vec r = v;
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& q : kept) r -= q.dot(r) * q;
    const double n = r.norm();
    if (n <= cutoff || n == 0.0) continue;
    kept.push_back(r / n);
  }
  Mat basis(ambient_dim, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) basis.col(static_cast<Eigen::Index>(i)) = kept[i];
  return Subspace(ambient_dim, std::move(basis), tol);
}

Subspace orthonormalize(const Mat& columns, double tol) {
  std::vector<Vec> cols;
  cols.reserve(static_cast<std::size_t>(columns.cols()));
  for (Eigen::Index c = 0; c < columns.cols(); ++c) cols.emplace_back(columns.col(c));
  return orthonormalize(static_cast<int>(columns.rows()), cols, tol);
}

Subspace intersect(const Subspace& a, const Subspace& b, double tol) {
  if (a.ambient_dim() != b.ambient_dim()) throw Error(ErrorKind::Shape, "intersect: ambient dimensions differ");
  if (a.rank() == 0 || b.rank() == 0) return Subspace::zero(a.ambient_dim(), tol);
  const Mat cross = a.basis().transpose() * b.basis();
  Eigen::JacobiSVD<Mat> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  std::vector<Vec> dirs;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] < 1.0 - tol) continue;
    // Average of the matched principal vectors; both lie within tol of the intersection.
    dirs.emplace_back(0.5 * (a.basis() * svd.matrixU().col(i) + b.basis() * svd.matrixV().col(i)));
  }
  Subspace out = orthonormalize(a.ambient_dim(), dirs, 1e-6);
  return Subspace(out.ambient_dim(), out.basis(), tol);
}

Subspace complement_within(const Subspace& s, const Subspace& within, double tol) {
  if (s.ambient_dim() != within.ambient_dim()) throw Error(ErrorKind::Shape, "complement: ambient dimensions differ");
  const Mat residual = within.basis() - s.projector() * within.basis();
  if (residual.cols() == 0) return Subspace::zero(s.ambient_dim(), tol);
  Eigen::JacobiSVD<Mat> svd(residual, Eigen::ComputeThinU);
  const int expected = within.rank() - s.rank();
  const Vec& sv = svd.singularValues();
  int count = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > tol) ++count;
  count = std::min(count, std::max(expected, 0));
  Subspace out = orthonormalize(svd.matrixU().leftCols(count), 1e-12);
  return Subspace(out.ambient_dim(), out.basis(), tol);
}

Subspace span_sum(const Subspace& a, const Subspace& b, double tol) {
  if (a.ambient_dim() != b.ambient_dim()) throw Error(ErrorKind::Shape, "span_sum: ambient dimensions differ");
  Mat both(a.ambient_dim(), a.rank() + b.rank());
  both << a.basis(), b.basis();
  return orthonormalize(both, tol);
}

Subspace apply_J(const QuaternionTriple& triple, int alpha, const Subspace& s) {
  const Mat& J = triple.J(alpha);
  if (s.ambient_dim() != triple.ambient_dim()) throw Error(ErrorKind::Shape, "apply_J: subspace lives in a different ambient space");
  // J is orthogonal, so the image of an orthonormal basis is orthonormal.
  return Subspace(s.ambient_dim(), J * s.basis(), s.tol());
}

Vec principal_cosines(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw Error(ErrorKind::Shape, "principal angles: ambient dimensions differ");
  if (a.rank() == 0 || b.rank() == 0) return Vec(0);
  Eigen::JacobiSVD<Mat> svd(a.basis().transpose() * b.basis());
  return svd.singularValues();
}

int numerical_rank(const Mat& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(m);
  const Vec& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * s[0]) ++r;
  return r;
}

}  // namespace qcr
