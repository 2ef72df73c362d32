#pragma once

#include <array>
#include <vector>

#include "qcr/immersion.hpp"

namespace qcr {

/// Pointwise split T = D + Dperp and normal = mu + mu_perp.
struct CRDecomposition {
  Subspace tangent;
  Subspace normal;
  Subspace D;
  Subspace Dperp;
  Subspace mu_perp;
  Subspace mu;
  bool is_cr = false;
  /// max over alpha and Dperp basis vectors of |P_T J_alpha w|
  double totally_real_residual = 0.0;
  /// max over alpha and D basis vectors of |(I - P_D) J_alpha d|
  double invariance_residual = 0.0;
  /// smallest singular value of the stacked J_alpha w (1 when Dperp = 0)
  double direct_sum_sigma = 1.0;

  int rank_D() const noexcept { return D.rank(); }
  int rank_Dperp() const noexcept { return Dperp.rank(); }
  const Subspace& distribution(Distribution which) const noexcept { return which == Distribution::D ? D : Dperp; }
};

/// D is the largest J-invariant subspace of the tangent space, found as
/// T n J1 T n J2 T n J3 T; Dperp is its complement in T.
CRDecomposition extract_cr(const PointGeometry& pg, const AmbientSpace& space, double tol = 1e-8);

/// Same split from a bare tangent frame. When `dperp_chart_vectors` is given
/// its image under the Jacobian is used as Dperp instead of the computed one.
CRDecomposition extract_cr(const TangentFrame& tf, const AmbientSpace& space, double tol,
                           const Mat* dperp_chart_vectors = nullptr);

/// Decomposition at a chart point, honouring the submanifold's Dperp override.
CRDecomposition decomposition_at(const ChartedSubmanifold& sub, const AmbientSpace& space, const Vec& u,
                                 const FdScheme& scheme = {}, double tol = 1e-8);

/// Q v or Q_perp v for a tangent vector v.
Vec project(const CRDecomposition& dec, const Vec& v, Distribution onto);

/// Orthonormal frame {e_1, J1 e_1, J2 e_1, J3 e_1, e_2, ...} of D. Each e_i is
/// the normalized projection of the coordinate axis with the largest remaining
/// component (lowest index on ties).
std::vector<Vec> quaternionic_frame(const Subspace& D, const QuaternionTriple& triple);

/// First-order jet of the projected coordinate frames P(u) J(u) of D and
/// Dperp around a chart point.
///
/// A vector Z of a distribution is extended to the field P(u') J(u') c with
/// c = chart coordinates of Z, held constant on the chart.
struct DistributionJet {
  Vec u;
  Mat jac;
  Mat inverse_metric;
  std::array<Mat, 2> projector;              // ambient projectors onto D, Dperp
  std::array<std::vector<Mat>, 2> d_frame;   // d/du_i of P J, one n x k matrix per axis
  std::array<std::vector<Mat>, 2> d_coeff;   // d/du_i of G^-1 J^T P J
  std::vector<Vec> stencil_points;
  std::array<std::vector<Mat>, 2> stencil_frames;

  static constexpr int index(Distribution d) noexcept { return d == Distribution::D ? 0 : 1; }

  Vec chart_coords(const Vec& X) const { return inverse_metric * (jac.transpose() * X); }
  /// Flat derivative of the extension of Z in the direction X.
  Vec covariant(Distribution which, const Vec& X, const Vec& Z) const;
  /// Lie bracket of the extensions of X and Z, from the chart coefficients.
  Vec bracket(Distribution which, const Vec& X, const Vec& Z) const;
  /// P(u') J(u') at a stencil point, if it was recorded.
  const Mat* frame_at(Distribution which, const Vec& v) const;
};

DistributionJet distribution_jet(const ChartedSubmanifold& sub, const AmbientSpace& space, const Vec& u,
                                 const FdScheme& scheme = {}, double tol = 1e-8);

/// h(X, Z) for which = D (value in Dperp) or h_perp(X, Z) for which = Dperp
/// (value in D): the complementary component of the tangential derivative of
/// the extension of Z along X.
Vec distribution_sff(const DistributionJet& jet, const CRDecomposition& dec, Distribution which, const Vec& X, const Vec& Z);

Vec distribution_sff(const ChartedSubmanifold& sub, const AmbientSpace& space, Distribution which, const Vec& u, const Vec& X,
                     const Vec& Z, const FdScheme& scheme = {}, double tol = 1e-8);

}  // namespace qcr
