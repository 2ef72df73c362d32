#include "qcr/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qcr/error.hpp"

namespace qcr {

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::True: return "true";
    case Verdict::False: return "false";
    case Verdict::NotApplicable: return "not-applicable";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

Verdict VerdictPolicy::classify(double residual) const {
  if (residual <= tol) return Verdict::True;
  if (residual < std::max(100.0 * tol, noise_floor)) return Verdict::Inconclusive;
  return Verdict::False;
}

std::string_view to_string(Identity id) noexcept {
  switch (id) {
    case Identity::DperpConnectionVsMixedSff: return "identity_dperp_connection_vs_mixed_sff";
    case Identity::AmbientDComponent: return "identity_ambient_d_component";
    case Identity::AmbientJDperpComponent: return "identity_ambient_jdperp_component";
    case Identity::AmbientMuComponent: return "identity_ambient_mu_component";
    case Identity::BundleLikeVsSff: return "identity_bundle_like_vs_sff";
    case Identity::DTraceTerms: return "identity_d_trace_terms";
  }
  return "identity_unknown";
}

namespace {

constexpr Distribution kD = Distribution::D;
constexpr Distribution kP = Distribution::Dperp;

/// Running supremum of a residual together with where it was attained.
class Sup {
 public:
  template <class... V>
  void offer(double r, const SamplePoint& p, const V&... v) {
    if (!std::isfinite(r)) r = std::numeric_limits<double>::infinity();
    if (r > worst_) {
      worst_ = r;
      witness_ = Witness{p.index, p.u, {Vec(v)...}};
    }
  }

  void merge(const Sup& other) {
    if (other.worst_ > worst_) {
      worst_ = other.worst_;
      witness_ = other.witness_;
    }
  }

  PredicateResult finish(std::string name, const VerdictPolicy& policy, bool applicable = true) const {
    PredicateResult r;
    r.name = std::move(name);
    r.tol = policy.tol;
    if (!applicable || worst_ < 0.0) return r;
    r.worst_residual = worst_;
    r.witness = witness_;
    r.verdict = policy.classify(worst_);
    return r;
  }

 private:
  double worst_ = -1.0;
  Witness witness_;
};

std::vector<Vec> tangent_samples(const SamplePoint& p) {
  std::vector<Vec> out = p.frame[0];
  out.insert(out.end(), p.frame[1].begin(), p.frame[1].end());
  return out;
}

/// Frame x frame, then the seeded random vectors zipped (shifted by one when
/// both slots draw from the same set).
template <class F>
void for_pairs(const std::vector<Vec>& fa, const std::vector<Vec>& ra, const std::vector<Vec>& fb, const std::vector<Vec>& rb,
               F&& f) {
  for (const Vec& x : fa)
    for (const Vec& y : fb) f(x, y);
  if (ra.empty() || rb.empty()) return;
  const std::size_t shift = &ra == &rb ? 1 : 0;
  for (std::size_t i = 0; i < ra.size(); ++i) f(ra[i], rb[(i + shift) % rb.size()]);
}

template <class F>
void for_pairs(const SamplePoint& p, Distribution a, Distribution b, F&& f) {
  for_pairs(p.frame_of(a), p.random_of(a), p.frame_of(b), p.random_of(b), f);
}

template <class F>
void for_triples(const SamplePoint& p, const std::vector<Vec>& fa, const std::vector<Vec>& ra, const std::vector<Vec>& fb,
                 const std::vector<Vec>& rb, const std::vector<Vec>& fc, const std::vector<Vec>& rc, F&& f) {
  for (const Vec& x : fa)
    for (const Vec& y : fb)
      for (const Vec& z : fc) f(x, y, z);
  (void)p;
  if (ra.empty() || rb.empty() || rc.empty()) return;
  for (std::size_t i = 0; i < ra.size(); ++i) f(ra[i], rb[(i + 1) % rb.size()], rc[(i + 2) % rc.size()]);
}

/// A_N X as an ambient tangent vector.
Vec shape(const SamplePoint& p, const Vec& N, const Vec& X) {
  const Mat& T = p.pg.tangent_basis;
  Vec out = Vec::Zero(T.rows());
  for (int a = 0; a < T.cols(); ++a) out += p.pg.second_form(X, T.col(a)).dot(N) * T.col(a);
  return out;
}

/// Ambient projector onto J_alpha(Dperp).
Mat j_dperp_projector(const SamplePoint& p, const AmbientSpace& space, int alpha) {
  const Mat& J = space.triple.J(alpha);
  return J * p.P_Dperp * J.transpose();
}

bool has_D(const CrSampleTable& t) { return t.rank_D() >= 4; }
bool has_Dperp(const CrSampleTable& t) { return t.rank_Dperp() >= 1; }

}  // namespace

GeodesyFlags check_geodesy(const CrSampleTable& table, const VerdictPolicy& policy) {
  Sup dd, pp, dp, all;
  for (const SamplePoint& p : table.points()) {
    for_pairs(p, kD, kD, [&](const Vec& X, const Vec& Y) { dd.offer(p.pg.second_form(X, Y).norm(), p, X, Y); });
    for_pairs(p, kP, kP, [&](const Vec& X, const Vec& Y) { pp.offer(p.pg.second_form(X, Y).norm(), p, X, Y); });
    for_pairs(p, kD, kP, [&](const Vec& X, const Vec& Y) { dp.offer(p.pg.second_form(X, Y).norm(), p, X, Y); });
    const Mat& T = p.pg.tangent_basis;
    for (int a = 0; a < T.cols(); ++a)
      for (int b = a; b < T.cols(); ++b) all.offer(p.pg.second_form(T.col(a), T.col(b)).norm(), p, T.col(a), T.col(b));
  }
  return GeodesyFlags{dd.finish("d_geodesic", policy, table.rank_D() > 0),
                      pp.finish("dperp_geodesic", policy, table.rank_Dperp() > 0),
                      dp.finish("mixed_geodesic", policy, table.rank_D() > 0 && table.rank_Dperp() > 0),
                      all.finish("totally_geodesic", policy)};
}

PredicateResult check_dperp_integrable(const CrSampleTable& table, const VerdictPolicy& policy) {
  Sup s;
  if (table.rank_Dperp() >= 2)
    for (const SamplePoint& p : table.points())
      for_pairs(p, kP, kP, [&](const Vec& X, const Vec& Z) { s.offer((p.P_D * p.jet.bracket(kP, X, Z)).norm(), p, X, Z); });
  return s.finish("dperp_integrable", policy, table.rank_Dperp() >= 2);
}

PredicateResult check_d_integrable(const CrSampleTable& table, const VerdictPolicy& policy) {
  Sup s;
  if (has_D(table))
    for (const SamplePoint& p : table.points())
      for_pairs(p, kD, kD, [&](const Vec& X, const Vec& Y) { s.offer((p.P_Dperp * p.jet.bracket(kD, X, Y)).norm(), p, X, Y); });
  return s.finish("d_integrable", policy, has_D(table));
}

PredicateResult check_d_minimal(const CrSampleTable& table, const VerdictPolicy& policy) {
  Sup s;
  const bool applicable = has_D(table) && has_Dperp(table);
  if (applicable)
    for (const SamplePoint& p : table.points()) {
      Vec trace = Vec::Zero(p.pg.ambient_dim());
      for (const Vec& E : p.frame[0]) trace += p.jet.covariant(kD, E, E);
      auto check = [&](const Vec& U) { s.offer(std::abs(trace.dot(U)), p, U); };
      for (const Vec& U : p.frame[1]) check(U);
      for (const Vec& U : p.random[1]) check(U);
    }
  return s.finish("d_minimal", policy, applicable);
}

std::array<PredicateResult, 4> check_totally_geodesic_foliation(const CrSampleTable& table, const VerdictPolicy& policy) {
  Sup i, ii, iii, iv;
  const bool applicable = has_D(table) && has_Dperp(table);
  if (applicable)
    for (const SamplePoint& p : table.points()) {
      for_pairs(p, kP, kP, [&](const Vec& X, const Vec& Z) { i.offer((p.P_D * p.jet.covariant(kP, X, Z)).norm(), p, X, Z); });
      for_pairs(p, kD, kP, [&](const Vec& X, const Vec& Y) { ii.offer((p.P_mu_perp * p.pg.second_form(X, Y)).norm(), p, X, Y); });
      for_pairs(p.frame[1], p.random[1], p.mu_perp_frame, p.mu_perp_random,
                [&](const Vec& X, const Vec& N) { iii.offer((p.P_D * shape(p, N, X)).norm(), p, X, N); });
      for_pairs(p.frame[0], p.random[0], p.mu_perp_frame, p.mu_perp_random,
                [&](const Vec& Y, const Vec& N) { iv.offer((p.P_Dperp * shape(p, N, Y)).norm(), p, Y, N); });
    }
  return {i.finish("tgf_i_dperp_leaves_totally_geodesic", policy, applicable),
          ii.finish("tgf_ii_mixed_sff_in_mu", policy, applicable),
          iii.finish("tgf_iii_shape_keeps_dperp", policy, applicable),
          iv.finish("tgf_iv_shape_keeps_d", policy, applicable)};
}

std::array<PredicateResult, 4> check_ruled(const CrSampleTable& table, const VerdictPolicy& policy) {
  Sup i, ii, iii, iv;
  const bool applicable = has_Dperp(table);
  const AmbientSpace& space = table.space();
  if (applicable)
    for (const SamplePoint& p : table.points()) {
      const std::vector<Vec> tangent = tangent_samples(p);
      for_pairs(p, kP, kP, [&](const Vec& X, const Vec& Z) {
        const Vec flat = p.jet.covariant(kP, X, Z);
        const double b = p.pg.second_form(X, Z).norm();
        i.offer(std::max(b, (p.P_D * flat).norm()), p, X, Z);
        ii.offer(b, p, X, Z);
        for (int a = 1; a <= 3; ++a) {
          const Mat& J = space.triple.J(a);
          iii.offer((p.P_mu * (J * flat)).norm(), p, X, Z);
          iv.offer(shape(p, J * Z, X).norm(), p, X, Z);
        }
      });
      for_pairs(p, kD, kP, [&](const Vec& X, const Vec& Y) { ii.offer((p.P_mu_perp * p.pg.second_form(X, Y)).norm(), p, X, Y); });
      for_pairs(p.frame[1], p.random[1], tangent, {},
                [&](const Vec& X, const Vec& Y) { iii.offer((p.P_mu_perp * p.pg.second_form(X, Y)).norm(), p, X, Y); });
      for_pairs(p.frame[1], p.random[1], p.frame[0], p.random[0],
                [&](const Vec& X, const Vec& Y) { iii.offer((p.P_mu_perp * p.pg.second_form(X, Y)).norm(), p, X, Y); });
      for_pairs(p.frame[1], p.random[1], p.mu_frame, p.mu_random,
                [&](const Vec& X, const Vec& N) { iv.offer((p.P_Dperp * shape(p, N, X)).norm(), p, X, N); });
    }
  return {i.finish("ruled_i_dperp_leaves_ambient_geodesic", policy, applicable),
          ii.finish("ruled_ii_dperp_geodesic_mixed_in_mu", policy, applicable),
          iii.finish("ruled_iii_mu_perp_parallel", policy, applicable),
          iv.finish("ruled_iv_shape_conditions", policy, applicable)};
}

PredicateResult check_d_leaves_ruled(const CrSampleTable& table, const VerdictPolicy& policy) {
  Sup s;
  if (has_D(table))
    for (const SamplePoint& p : table.points())
      for_pairs(p, kD, kD, [&](const Vec& X, const Vec& Y) {
        const double b = p.pg.second_form(X, Y).norm();
        s.offer(std::max(b, (p.P_Dperp * p.jet.covariant(kD, X, Y)).norm()), p, X, Y);
      });
  return s.finish("d_leaves_ambient_geodesic", policy, has_D(table));
}

BundleLikeResult check_bundle_like(const CrSampleTable& table, const VerdictPolicy& policy) {
  Sup metric, sff, mu_free;
  const bool applicable = has_D(table) && has_Dperp(table);
  const AmbientSpace& space = table.space();
  if (applicable)
    for (const SamplePoint& p : table.points()) {
      for_triples(p, p.frame[1], p.random[1], p.frame[0], p.random[0], p.frame[0], p.random[0],
                  [&](const Vec& X, const Vec& U, const Vec& V) {
                    const double v = p.jet.covariant(kP, U, X).dot(V) + p.jet.covariant(kP, V, X).dot(U);
                    metric.offer(std::abs(v), p, X, U, V);
                  });
      const std::array<Mat, 3> PJ{j_dperp_projector(p, space, 1), j_dperp_projector(p, space, 2), j_dperp_projector(p, space, 3)};
      for_pairs(p, kD, kD, [&](const Vec& U, const Vec& V) {
        for (const EvenPermutation& perm : kEvenPermutations) {
          const Mat& J = space.triple.J(perm.alpha);
          const Vec sum = p.pg.second_form(U, J * V) + p.pg.second_form(V, J * U);
          sff.offer((PJ[static_cast<std::size_t>(perm.alpha - 1)] * sum).norm(), p, U, V);
          const Vec rest = sum - PJ[static_cast<std::size_t>(perm.beta - 1)] * sum - PJ[static_cast<std::size_t>(perm.gamma - 1)] * sum;
          mu_free.offer(rest.norm(), p, U, V);
        }
      });
    }
  return {metric.finish("bundle_like_metric_form", policy, applicable), sff.finish("bundle_like_sff_form", policy, applicable),
          mu_free.finish("bundle_like_sff_form_mu_free", policy, applicable)};
}

QrProductResult check_qr_product(const CrSampleTable& table, const VerdictPolicy& policy) {
  const GeodesyFlags g = check_geodesy(table, policy);
  Sup mixed;
  const bool applicable = table.rank_D() > 0 && table.rank_Dperp() > 0;
  if (applicable)
    for (const SamplePoint& p : table.points())
      for_pairs(p, kP, kD, [&](const Vec& X, const Vec& Y) { mixed.offer((p.P_mu_perp * p.pg.second_form(X, Y)).norm(), p, X, Y); });
  QrProductResult out;
  out.d_geodesic = g.d_geodesic;
  out.d_geodesic.name = "qr_i_d_geodesic";
  out.dperp_geodesic = g.dperp_geodesic;
  out.dperp_geodesic.name = "qr_ii_dperp_geodesic";
  out.mixed_in_mu = mixed.finish("qr_iii_mixed_sff_in_mu", policy, applicable);

  PredicateResult& c = out.combined;
  c.name = "qr_conditions";
  c.tol = policy.tol;
  bool any = false, any_false = false, any_inconclusive = false;
  for (const PredicateResult* r : {&out.d_geodesic, &out.dperp_geodesic, &out.mixed_in_mu}) {
    if (r->verdict == Verdict::NotApplicable) continue;
    any = true;
    any_false |= r->verdict == Verdict::False;
    any_inconclusive |= r->verdict == Verdict::Inconclusive;
    if (r->worst_residual >= c.worst_residual) {
      c.worst_residual = r->worst_residual;
      c.witness = r->witness;
    }
  }
  c.verdict = !any ? Verdict::NotApplicable : any_false ? Verdict::False : any_inconclusive ? Verdict::Inconclusive : Verdict::True;
  return out;
}

double dperp_connection_vs_mixed_sff(const SamplePoint& p, const AmbientSpace& space, const Vec& X, const Vec& Z, const Vec& Y) {
  const Vec nabla = p.P_T * p.jet.covariant(kP, X, Z);
  const Vec bxy = p.pg.second_form(X, Y);
  double worst = 0.0;
  for (int a = 1; a <= 3; ++a) {
    const Mat& J = space.triple.J(a);
    worst = std::max(worst, std::abs((J * nabla).dot(Y) + bxy.dot(J * Z)));
  }
  return worst;
}

double ambient_d_component(const SamplePoint& p, const AmbientSpace& space, const Vec& X, const Vec& Z, const Vec& U) {
  const double lhs = p.jet.covariant(kP, X, Z).dot(U);
  double worst = 0.0;
  for (int a = 1; a <= 3; ++a) {
    const Mat& J = space.triple.J(a);
    worst = std::max(worst, std::abs(lhs + p.pg.second_form(X, J * U).dot(J * Z)));
  }
  return worst;
}

double ambient_jdperp_component(const SamplePoint& p, const AmbientSpace& space, const Vec& X, const Vec& Z, const Vec& W) {
  const Vec flat = p.jet.covariant(kP, X, Z);
  const Vec bxz = p.pg.second_form(X, Z);
  double worst = 0.0;
  for (int a = 1; a <= 3; ++a) {
    const Vec JW = space.triple.J(a) * W;
    worst = std::max(worst, std::abs(flat.dot(JW) - bxz.dot(JW)));
  }
  return worst;
}

double ambient_mu_component(const CrSampleTable& table, const SamplePoint& p, const Vec& X, const Vec& Z, const Vec& N) {
  const ChartedSubmanifold& sub = table.submanifold();
  const AmbientSpace& space = table.space();
  const TableOptions& opt = table.options();
  const double lhs = p.jet.covariant(kP, X, Z).dot(N);
  const Vec a = p.jet.chart_coords(X);
  const Vec c = p.jet.chart_coords(Z);
  double worst = 0.0;
  for (int alpha = 1; alpha <= 3; ++alpha) {
    const Mat& J = space.triple.J(alpha);
    auto field = [&](const Vec& v) -> Vec {
      const CRDecomposition dec = decomposition_at(sub, space, v, opt.scheme, opt.rank_tol);
      return J * dec.Dperp.project(jacobian(sub, v, opt.scheme) * c);
    };
    const NormalDerivative nd = normal_connection_along(sub, space, p.u, field, a, opt.scheme);
    worst = std::max(worst, std::abs(lhs - nd.nabla_perp.dot(J * N)));
  }
  return worst;
}

double bundle_like_vs_sff(const SamplePoint& p, const AmbientSpace& space, const Vec& X, const Vec& U, const Vec& V) {
  const double lhs = p.jet.covariant(kP, U, X).dot(V) + p.jet.covariant(kP, V, X).dot(U);
  double worst = 0.0;
  for (int a = 1; a <= 3; ++a) {
    const Mat& J = space.triple.J(a);
    const Vec sum = p.pg.second_form(U, J * V) + p.pg.second_form(V, J * U);
    worst = std::max(worst, std::abs(lhs + sum.dot(J * X)));
  }
  return worst;
}

double d_trace_terms(const SamplePoint& p, const AmbientSpace& space, const Vec& X, const Vec& U) {
  const double hxx = p.jet.covariant(kD, X, X).dot(U);
  double worst = 0.0;
  for (int a = 1; a <= 3; ++a) {
    const Mat& J = space.triple.J(a);
    const Vec JX = J * X;
    const double b = p.pg.second_form(X, JX).dot(J * U);
    const double hjj = p.jet.covariant(kD, JX, JX).dot(U);
    worst = std::max({worst, std::abs(hxx - b), std::abs(hjj + b)});
  }
  return worst;
}

PredicateResult check_identity(const CrSampleTable& table, Identity id, const VerdictPolicy& policy) {
  Sup s;
  const AmbientSpace& space = table.space();
  const bool d = has_D(table), dp = has_Dperp(table);
  bool applicable = false;
  for (const SamplePoint& p : table.points()) {
    const auto& fD = p.frame[0];
    const auto& rD = p.random[0];
    const auto& fP = p.frame[1];
    const auto& rP = p.random[1];
    switch (id) {
      case Identity::DperpConnectionVsMixedSff:
        applicable = d && dp;
        if (applicable)
          for_triples(p, fP, rP, fP, rP, fD, rD, [&](const Vec& X, const Vec& Z, const Vec& Y) {
            s.offer(dperp_connection_vs_mixed_sff(p, space, X, Z, Y), p, X, Z, Y);
          });
        break;
      case Identity::AmbientDComponent:
        applicable = d && dp;
        if (applicable)
          for_triples(p, fP, rP, fP, rP, fD, rD,
                      [&](const Vec& X, const Vec& Z, const Vec& U) { s.offer(ambient_d_component(p, space, X, Z, U), p, X, Z, U); });
        break;
      case Identity::AmbientJDperpComponent:
        applicable = dp;
        if (applicable)
          for_triples(p, fP, rP, fP, rP, fP, rP,
                      [&](const Vec& X, const Vec& Z, const Vec& W) { s.offer(ambient_jdperp_component(p, space, X, Z, W), p, X, Z, W); });
        break;
      case Identity::AmbientMuComponent:
        applicable = dp && !table.mu_vanishes();
        if (applicable)
          for_triples(p, fP, rP, fP, rP, p.mu_frame, p.mu_random,
                      [&](const Vec& X, const Vec& Z, const Vec& N) { s.offer(ambient_mu_component(table, p, X, Z, N), p, X, Z, N); });
        break;
      case Identity::BundleLikeVsSff:
        applicable = d && dp;
        if (applicable)
          for_triples(p, fP, rP, fD, rD, fD, rD,
                      [&](const Vec& X, const Vec& U, const Vec& V) { s.offer(bundle_like_vs_sff(p, space, X, U, V), p, X, U, V); });
        break;
      case Identity::DTraceTerms:
        applicable = d && dp;
        if (applicable)
          for_pairs(fD, rD, fP, rP, [&](const Vec& X, const Vec& U) { s.offer(d_trace_terms(p, space, X, U), p, X, U); });
        break;
    }
  }
  return s.finish(std::string(to_string(id)), policy, applicable);
}

PredicateResult check_gauss_equation(const CrSampleTable& table, const VerdictPolicy& policy) {
  Sup s;
  for (const SamplePoint& p : table.points()) {
    const Tensor4 Rm = p.riemann ? *p.riemann : riemann_tensor(table.submanifold(), p.u, table.options().scheme);
    s.offer(gauss_equation_residual_all(p.pg, Rm), p);
  }
  return s.finish("gauss_equation", policy, table.space().c == 0.0);
}

LeafCurvatureResult check_leaf_space_forms(const CrSampleTable& table, const VerdictPolicy& policy, double leaf_half_width) {
  const ChartedSubmanifold& sub = table.submanifold();
  const AmbientSpace& space = table.space();
  const FdScheme& scheme = table.options().scheme;
  Sup dperp, dleaf, consistency;
  LeafCurvatureResult out;
  auto not_applicable = [&] {
    return LeafCurvatureResult{dperp.finish("leaf_dperp_curvature", policy, false), dleaf.finish("leaf_d_quaternion_curvature", policy, false),
                               consistency.finish("leaf_curvature_consistency", policy, false)};
  };
  if (!has_Dperp(table)) return not_applicable();
  const VerdictPolicy structural;
  const GeodesyFlags g = check_geodesy(table, structural);
  const auto ruled = check_ruled(table, structural);
  const bool d_ok = g.d_geodesic.verdict == Verdict::True || g.d_geodesic.verdict == Verdict::NotApplicable;
  if (!d_ok || ruled[0].verdict != Verdict::True) return not_applicable();

  const LeafChart* perp_chart = sub.leaf(Distribution::Dperp);
  const LeafChart* d_chart = sub.leaf(Distribution::D);
  if (!perp_chart) throw Error(ErrorKind::Configuration, sub.name + ": no leaf chart for Dperp");
  if (has_D(table) && !d_chart) throw Error(ErrorKind::Configuration, sub.name + ": no leaf chart for D");

  for (const SamplePoint& p : table.points()) {
    const Vec origin = Vec::Zero(perp_chart->dim);
    const ChartedSubmanifold leaf = leaf_submanifold(sub, *perp_chart, p.u, leaf_half_width);
    const PointGeometry lpg = point_geometry(leaf, space, origin, scheme);
    const Tensor4 Rl = riemann_tensor(leaf, origin, scheme);
    const Tensor4 Rm = p.riemann ? *p.riemann : riemann_tensor(sub, p.u, scheme);
    const Mat& T = lpg.tangent_basis;
    const int r = static_cast<int>(T.cols());
    double off = 0.0;
    for (int a = 0; a < r; ++a) off = std::max(off, (T.col(a) - p.P_Dperp * T.col(a)).norm());
    dperp.offer(off, p);
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b)
        for (int c = 0; c < r; ++c)
          for (int d = 0; d < r; ++d) {
            const Vec X = T.col(a), Y = T.col(b), Z = T.col(c), U = T.col(d);
            const double leaf_value = riemann_value(Rl, lpg, X, Y, Z, U);
            dperp.offer(std::abs(leaf_value - space_form_curvature(space, X, Y, Z, U).value), p, X, Y, Z, U);
            consistency.offer(std::abs(riemann_value(Rm, p.pg, X, Y, Z, U) - leaf_value), p, X, Y, Z, U);
          }
    if (r == 1) consistency.offer(0.0, p);

    if (has_D(table)) {
      const Vec dorigin = Vec::Zero(d_chart->dim);
      const ChartedSubmanifold dl = leaf_submanifold(sub, *d_chart, p.u, leaf_half_width);
      const PointGeometry dpg = point_geometry(dl, space, dorigin, scheme);
      const Tensor4 Rd = riemann_tensor(dl, dorigin, scheme);
      double doff = 0.0;
      for (int a = 0; a < dpg.tangent_basis.cols(); ++a)
        doff = std::max(doff, (dpg.tangent_basis.col(a) - p.P_D * dpg.tangent_basis.col(a)).norm());
      dleaf.offer(doff, p);
      const Subspace leaf_tangent(space.dim(), dpg.tangent_basis, 1e-8);
      std::vector<Vec> units = quaternionic_frame(leaf_tangent, space.triple);
      units.insert(units.end(), p.random[0].begin(), p.random[0].end());
      for (const Vec& X0 : units) {
        const Vec X = leaf_tangent.project(X0).normalized();
        for (int alpha = 1; alpha <= 3; ++alpha) {
          const Vec JX = space.triple.J(alpha) * X;
          const double value = riemann_value(Rd, dpg, X, JX, JX, X);
          dleaf.offer(std::abs(value - quaternion_sectional_curvature(space, X, alpha)), p, X);
        }
      }
    }
  }
  out.dperp_leaves = dperp.finish("leaf_dperp_curvature", policy);
  out.d_leaves = dleaf.finish("leaf_d_quaternion_curvature", policy, has_D(table));
  out.consistency = consistency.finish("leaf_curvature_consistency", policy);
  return out;
}

}  // namespace qcr
