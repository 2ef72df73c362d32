#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qcr {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// The three structure operators on H^m = R^{4m}.
///
/// Each factor of H^m occupies four consecutive coordinates (1, i, j, k) and
/// J1, J2, J3 act by left multiplication with i, j, k on every factor. The
/// matrices have entries in {-1, 0, 1}, so the quaternion relations hold
/// exactly in floating point.
class QuaternionTriple {
 public:
  explicit QuaternionTriple(int m);

  int dim_factor() const noexcept { return m_; }
  int ambient_dim() const noexcept { return 4 * m_; }

  /// alpha in 1..3; throws Index otherwise.
  const Mat& J(int alpha) const;
  const Mat& operator[](int alpha) const { return J(alpha); }

 private:
  int m_;
  std::array<Mat, 3> J_;
};

/// (alpha, beta, gamma) with J_alpha J_beta = J_gamma.
struct EvenPermutation {
  int alpha;
  int beta;
  int gamma;
};

inline constexpr std::array<EvenPermutation, 3> kEvenPermutations{{{1, 2, 3}, {2, 3, 1}, {3, 1, 2}}};

QuaternionTriple make_quaternion_triple(int m);

/// Left multiplication of quaternions stored as (1, i, j, k) coefficients.
Eigen::Vector4d quaternion_product(const Eigen::Vector4d& p, const Eigen::Vector4d& q);

/// Orthonormal basis of a linear subspace of R^n. Immutable once built.
class Subspace {
 public:
  Subspace() : Subspace(0, Mat(0, 0), 0.0) {}
  Subspace(int ambient_dim, Mat basis, double tol);

  static Subspace zero(int ambient_dim, double tol = 0.0);
  static Subspace whole(int ambient_dim);

  int ambient_dim() const noexcept { return ambient_dim_; }
  int rank() const noexcept { return static_cast<int>(basis_.cols()); }
  double tol() const noexcept { return tol_; }
  const Mat& basis() const noexcept { return basis_; }
  Vec vector(int i) const { return basis_.col(i); }

  Mat projector() const;
  Vec project(const Vec& v) const;
  /// Norm of the component of v orthogonal to this subspace.
  double residual(const Vec& v) const;

 private:
  int ambient_dim_;
  Mat basis_;
  double tol_;
};

/// Gram-Schmidt (two passes) over the input; a vector is dropped when its
/// residual norm is <= tol * (largest input norm).
Subspace orthonormalize(int ambient_dim, std::span<const Vec> vectors, double tol = 1e-10);
Subspace orthonormalize(const Mat& columns, double tol = 1e-10);

/// Intersection from the singular values of the product of bases; directions
/// with cosine >= 1 - tol are kept.
Subspace intersect(const Subspace& a, const Subspace& b, double tol = 1e-8);

/// Orthogonal complement of `s` inside `within` (s is assumed to lie in it).
Subspace complement_within(const Subspace& s, const Subspace& within, double tol = 1e-8);

/// Span of the union of both bases.
Subspace span_sum(const Subspace& a, const Subspace& b, double tol = 1e-10);

Subspace apply_J(const QuaternionTriple& triple, int alpha, const Subspace& s);

/// Cosines of the principal angles, descending.
Vec principal_cosines(const Subspace& a, const Subspace& b);

/// Numerical rank with the relative cutoff rel_tol * sigma_max.
int numerical_rank(const Mat& m, double rel_tol = 1e-8);

}  // namespace qcr
