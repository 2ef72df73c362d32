#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "qcr/sample_table.hpp"

namespace qcr {

enum class Verdict { True, False, NotApplicable, Inconclusive };

std::string_view to_string(Verdict v) noexcept;

/// Maps a worst-case residual to a verdict.
///
/// residual <= tol is true; residual below max(100 tol, noise_floor) is
/// inconclusive; anything larger is false.
struct VerdictPolicy {
  double tol = 1e-6;
  double noise_floor = 1e-6;

  Verdict classify(double residual) const;
};

/// Tolerance for the displayed identities, the Gauss equation and the leaf
/// curvature checks.
inline constexpr double kIdentityTol = 1e-5;

struct Witness {
  int point = -1;
  Vec u;
  std::vector<Vec> vectors;
};

struct PredicateResult {
  std::string name;
  Verdict verdict = Verdict::NotApplicable;
  double worst_residual = 0.0;
  Witness witness;
  double tol = 0.0;
};

struct GeodesyFlags {
  PredicateResult d_geodesic;
  PredicateResult dperp_geodesic;
  PredicateResult mixed_geodesic;
  PredicateResult totally_geodesic;
};

/// sup |B(X, Y)| over D x D, Dperp x Dperp, D x Dperp and T x T.
GeodesyFlags check_geodesy(const CrSampleTable& table, const VerdictPolicy& policy = {});

/// sup |Q [X, Z]| over Dperp frame fields; needs rank Dperp >= 2.
PredicateResult check_dperp_integrable(const CrSampleTable& table, const VerdictPolicy& policy = {});

/// sup |Q_perp [X, Y]| over D frame fields; needs rank D >= 4.
PredicateResult check_d_integrable(const CrSampleTable& table, const VerdictPolicy& policy = {});

/// |sum over the quaternionic frame of <h(E, E), U>| for unit U in Dperp.
PredicateResult check_d_minimal(const CrSampleTable& table, const VerdictPolicy& policy = {});

/// Four characterizations of a totally geodesic Dperp foliation:
/// (i) Q nabla_X Z = 0, (ii) B(D, Dperp) in mu, (iii) A_N Dperp in Dperp and
/// (iv) A_N D in D for N in mu_perp.
std::array<PredicateResult, 4> check_totally_geodesic_foliation(const CrSampleTable& table, const VerdictPolicy& policy = {});

/// Four characterizations of Dperp leaves that are totally geodesic in the
/// ambient space.
std::array<PredicateResult, 4> check_ruled(const CrSampleTable& table, const VerdictPolicy& policy = {});

/// D leaves totally geodesic in the ambient space: B(D, D) = 0 and h = 0.
PredicateResult check_d_leaves_ruled(const CrSampleTable& table, const VerdictPolicy& policy = {});

struct BundleLikeResult {
  /// |g(nabla_U X, V) + g(nabla_V X, U)| for X in Dperp, U, V in D
  PredicateResult metric_form;
  /// |proj onto J_alpha Dperp of B(U, J_alpha V) + B(V, J_alpha U)|
  PredicateResult sff_form;
  /// same sum with only the J_beta Dperp + J_gamma Dperp part removed
  PredicateResult sff_form_mu_free;
};

BundleLikeResult check_bundle_like(const CrSampleTable& table, const VerdictPolicy& policy = {});

struct QrProductResult {
  PredicateResult d_geodesic;
  PredicateResult dperp_geodesic;
  PredicateResult mixed_in_mu;
  /// true when the three conditions hold; not-applicable ones are skipped
  PredicateResult combined;
};

QrProductResult check_qr_product(const CrSampleTable& table, const VerdictPolicy& policy = {});

enum class Identity {
  DperpConnectionVsMixedSff,
  AmbientDComponent,
  AmbientJDperpComponent,
  AmbientMuComponent,
  BundleLikeVsSff,
  DTraceTerms,
};

inline constexpr std::array<Identity, 6> kAllIdentities{Identity::DperpConnectionVsMixedSff, Identity::AmbientDComponent,
                                                        Identity::AmbientJDperpComponent,    Identity::AmbientMuComponent,
                                                        Identity::BundleLikeVsSff,           Identity::DTraceTerms};

std::string_view to_string(Identity id) noexcept;

/// |<J_a nabla_X Z, Y> + <B(X, Y), J_a Z>|, X, Z in Dperp, Y in D, worst alpha.
double dperp_connection_vs_mixed_sff(const SamplePoint& p, const AmbientSpace& space, const Vec& X, const Vec& Z, const Vec& Y);
/// |<Dbar_X Z, U> + <B(X, J_a U), J_a Z>|, X, Z in Dperp, U in D.
double ambient_d_component(const SamplePoint& p, const AmbientSpace& space, const Vec& X, const Vec& Z, const Vec& U);
/// |<Dbar_X Z, J_a W> - <B(X, Z), J_a W>|, X, Z, W in Dperp.
double ambient_jdperp_component(const SamplePoint& p, const AmbientSpace& space, const Vec& X, const Vec& Z, const Vec& W);
/// |<Dbar_X Z, N> - <nabla_perp_X J_a Z, J_a N>|, X, Z in Dperp, N in mu. The
/// normal connection is differentiated afresh along X.
double ambient_mu_component(const CrSampleTable& table, const SamplePoint& p, const Vec& X, const Vec& Z, const Vec& N);
/// |g(nabla_U X, V) + g(nabla_V X, U) + <B(U, J_a V) + B(V, J_a U), J_a X>|.
double bundle_like_vs_sff(const SamplePoint& p, const AmbientSpace& space, const Vec& X, const Vec& U, const Vec& V);
/// Worst of |<h(X, X), U> - <B(X, J_a X), J_a U>| and
/// |<h(J_a X, J_a X), U> + <B(X, J_a X), J_a U>| for X in D, U in Dperp.
double d_trace_terms(const SamplePoint& p, const AmbientSpace& space, const Vec& X, const Vec& U);

/// Worst residual of one identity over frame tuples and seeded random tuples.
PredicateResult check_identity(const CrSampleTable& table, Identity id, const VerdictPolicy& policy = {kIdentityTol, 1e-6});

/// Gauss equation over all orthonormal tangent tuples.
PredicateResult check_gauss_equation(const CrSampleTable& table, const VerdictPolicy& policy = {kIdentityTol, 1e-6});

struct LeafCurvatureResult {
  /// Dperp leaves against the real space form of curvature c/4
  PredicateResult dperp_leaves;
  /// quaternion sectional curvature of D leaves against c
  PredicateResult d_leaves;
  /// curvature of M on Dperp against the Dperp leaf curvature
  PredicateResult consistency;
};

/// Needs a D-geodesic scenario whose Dperp leaves are ambient-geodesic;
/// otherwise every entry is not-applicable. Throws Configuration when a
/// needed leaf chart is missing.
LeafCurvatureResult check_leaf_space_forms(const CrSampleTable& table, const VerdictPolicy& policy = {kIdentityTol, 1e-6},
                                           double leaf_half_width = 0.1);

}  // namespace qcr
