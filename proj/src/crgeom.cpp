#include "qcr/crgeom.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qcr/error.hpp"

namespace qcr {

namespace {

void fill_checks(CRDecomposition& dec, const QuaternionTriple& triple) {
  const Mat PT = dec.tangent.projector();
  const Mat PD = dec.D.projector();
  const int n = dec.tangent.ambient_dim();
  dec.totally_real_residual = 0.0;
  dec.invariance_residual = 0.0;
  Mat stacked(n, 3 * dec.rank_Dperp());
  for (int a = 1; a <= 3; ++a) {
    const Mat& J = triple.J(a);
    for (int i = 0; i < dec.rank_D(); ++i) {
      const Vec Jd = J * dec.D.vector(i);
      dec.invariance_residual = std::max(dec.invariance_residual, (Jd - PD * Jd).norm());
    }
    for (int i = 0; i < dec.rank_Dperp(); ++i) {
      const Vec Jw = J * dec.Dperp.vector(i);
      dec.totally_real_residual = std::max(dec.totally_real_residual, (PT * Jw).norm());
      stacked.col((a - 1) * dec.rank_Dperp() + i) = Jw;
    }
  }
  if (dec.rank_Dperp() > 0) {
    Eigen::JacobiSVD<Mat> svd(stacked);
    dec.direct_sum_sigma = svd.singularValues()[svd.singularValues().size() - 1];
  } else {
    dec.direct_sum_sigma = 1.0;
  }
}

}  // namespace

CRDecomposition extract_cr(const TangentFrame& tf, const AmbientSpace& space, double tol, const Mat* dperp_chart_vectors) {
  const int n = space.dim();
  if (tf.tangent.rows() != n) throw Error(ErrorKind::Shape, "extract_cr: tangent frame lives in a different space");
  CRDecomposition dec{Subspace(n, tf.tangent, tol), Subspace(n, tf.normal, tol), Subspace::zero(n), Subspace::zero(n),
                      Subspace::zero(n), Subspace::zero(n)};
  if (dperp_chart_vectors) {
    dec.Dperp = orthonormalize(tf.jac * *dperp_chart_vectors, 1e-10);
    dec.D = complement_within(dec.Dperp, dec.tangent, tol);
  } else {
    Subspace D = dec.tangent;
    for (int a = 1; a <= 3; ++a) D = intersect(D, apply_J(space.triple, a, dec.tangent), tol);
    dec.D = D;
    dec.Dperp = complement_within(dec.D, dec.tangent, tol);
  }
  std::vector<Vec> images;
  for (int a = 1; a <= 3; ++a)
    for (int i = 0; i < dec.rank_Dperp(); ++i) images.push_back(space.triple.J(a) * dec.Dperp.vector(i));
  // Only the normal part enters mu_perp; for a CR point the images are normal already.
  for (Vec& v : images) v = dec.normal.project(v);
  dec.mu_perp = orthonormalize(n, images, 1e-6);
  dec.mu = complement_within(dec.mu_perp, dec.normal, tol);
  fill_checks(dec, space.triple);
  dec.is_cr = dec.totally_real_residual <= tol && dec.invariance_residual <= tol && dec.rank_D() % 4 == 0 &&
              dec.mu_perp.rank() == 3 * dec.rank_Dperp();
  return dec;
}

CRDecomposition extract_cr(const PointGeometry& pg, const AmbientSpace& space, double tol) {
  TangentFrame tf{pg.jac, pg.tangent_basis, pg.normal_basis, pg.induced_metric};
  return extract_cr(tf, space, tol);
}

namespace {

CRDecomposition decomposition_from_frame(const ChartedSubmanifold& sub, const AmbientSpace& space, const TangentFrame& tf,
                                         const Vec& u, double tol) {
  if (sub.dperp_override) {
    const Mat w = sub.dperp_override(u);
    return extract_cr(tf, space, tol, &w);
  }
  return extract_cr(tf, space, tol);
}

}  // namespace

CRDecomposition decomposition_at(const ChartedSubmanifold& sub, const AmbientSpace& space, const Vec& u, const FdScheme& scheme,
                                 double tol) {
  return decomposition_from_frame(sub, space, tangent_frame(sub, u, scheme), u, tol);
}

Vec project(const CRDecomposition& dec, const Vec& v, Distribution onto) {
  if (v.size() != dec.tangent.ambient_dim()) throw Error(ErrorKind::Shape, "project: vector has wrong length");
  const double off = dec.tangent.residual(v);
  if (off > 1e-8 * std::max(1.0, v.norm())) {
    std::ostringstream msg;
    msg << "vector is not tangent (normal component " << off << ")";
    throw Error(ErrorKind::ProjectionDomain, msg.str());
  }
  return dec.distribution(onto).project(v);
}

std::vector<Vec> quaternionic_frame(const Subspace& D, const QuaternionTriple& triple) {
  const int n = D.ambient_dim();
  std::vector<Vec> frame;
  Subspace remaining = D;
  while (remaining.rank() > 0) {
    int best = 0;
    double best_norm = -1.0;
    for (int j = 0; j < n; ++j) {
      const double v = remaining.basis().row(j).norm();
      if (v > best_norm + 1e-12) {
        best_norm = v;
        best = j;
      }
    }
    const Vec e = remaining.project(Vec::Unit(n, best)).normalized();
    frame.push_back(e);
    for (int a = 1; a <= 3; ++a) frame.push_back(triple.J(a) * e);
    const Subspace used = orthonormalize(n, std::span<const Vec>(frame.data(), frame.size()), 1e-10);
    remaining = complement_within(used, D, 1e-8);
    if (static_cast<int>(frame.size()) > D.rank()) break;
  }
  return frame;
}

Vec DistributionJet::covariant(Distribution which, const Vec& X, const Vec& Z) const {
  const Vec a = chart_coords(X);
  const Vec c = chart_coords(Z);
  const auto& d = d_frame[static_cast<std::size_t>(index(which))];
  Vec out = Vec::Zero(jac.rows());
  for (std::size_t i = 0; i < d.size(); ++i) out += a[static_cast<Eigen::Index>(i)] * (d[i] * c);
  return out;
}

Vec DistributionJet::bracket(Distribution which, const Vec& X, const Vec& Z) const {
  const Vec a = chart_coords(X);
  const Vec b = chart_coords(Z);
  const auto& d = d_coeff[static_cast<std::size_t>(index(which))];
  Vec coords = Vec::Zero(jac.cols());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    coords += a[ii] * (d[i] * b) - b[ii] * (d[i] * a);
  }
  return jac * coords;
}

const Mat* DistributionJet::frame_at(Distribution which, const Vec& v) const {
  for (std::size_t s = 0; s < stencil_points.size(); ++s)
    if (stencil_points[s] == v) return &stencil_frames[static_cast<std::size_t>(index(which))][s];
  return nullptr;
}

DistributionJet distribution_jet(const ChartedSubmanifold& sub, const AmbientSpace& space, const Vec& u, const FdScheme& scheme,
                                 double tol) {
  const int k = sub.k;
  DistributionJet jet;
  jet.u = u;
  {
    const TangentFrame tf = tangent_frame(sub, u, scheme);
    jet.jac = tf.jac;
    jet.inverse_metric = tf.metric.inverse();
    const CRDecomposition dec = decomposition_from_frame(sub, space, tf, u, tol);
    jet.projector = {dec.D.projector(), dec.Dperp.projector()};
  }
  // One decomposition per stencil point feeds both distributions.
  struct Sample {
    std::array<Mat, 2> frame;
    std::array<Mat, 2> coeff;
  };
  auto sample = [&](const Vec& v) {
    const TangentFrame tf = tangent_frame(sub, v, scheme);
    const CRDecomposition dec = decomposition_from_frame(sub, space, tf, v, tol);
    const Mat ginv = tf.metric.inverse();
    Sample s;
    for (int w = 0; w < 2; ++w) {
      const Subspace& S = w == 0 ? dec.D : dec.Dperp;
      s.frame[static_cast<std::size_t>(w)] = S.basis() * (S.basis().transpose() * tf.jac);
      s.coeff[static_cast<std::size_t>(w)] = ginv * tf.jac.transpose() * s.frame[static_cast<std::size_t>(w)];
    }
    jet.stencil_points.push_back(v);
    for (int w = 0; w < 2; ++w) jet.stencil_frames[static_cast<std::size_t>(w)].push_back(s.frame[static_cast<std::size_t>(w)]);
    return s;
  };
  const double h = scheme.field_step;
  for (int w = 0; w < 2; ++w) {
    jet.d_frame[static_cast<std::size_t>(w)].resize(static_cast<std::size_t>(k));
    jet.d_coeff[static_cast<std::size_t>(w)].resize(static_cast<std::size_t>(k));
  }
  for (int i = 0; i < k; ++i) {
    const Sample p1 = sample(fd::offset(u, i, h)), m1 = sample(fd::offset(u, i, -h));
    const Sample p2 = sample(fd::offset(u, i, 0.5 * h)), m2 = sample(fd::offset(u, i, -0.5 * h));
    for (std::size_t w = 0; w < 2; ++w) {
      const Mat coarse_f = (p1.frame[w] - m1.frame[w]) / (2.0 * h);
      const Mat fine_f = (p2.frame[w] - m2.frame[w]) / h;
      jet.d_frame[w][static_cast<std::size_t>(i)] = (4.0 * fine_f - coarse_f) / 3.0;
      const Mat coarse_c = (p1.coeff[w] - m1.coeff[w]) / (2.0 * h);
      const Mat fine_c = (p2.coeff[w] - m2.coeff[w]) / h;
      jet.d_coeff[w][static_cast<std::size_t>(i)] = (4.0 * fine_c - coarse_c) / 3.0;
    }
  }
  return jet;
}

Vec distribution_sff(const DistributionJet& jet, const CRDecomposition& dec, Distribution which, const Vec& X, const Vec& Z) {
  const Subspace& S = dec.distribution(which);
  for (const Vec* v : {&X, &Z}) {
    const double off = S.residual(*v);
    if (off > 1e-8 * std::max(1.0, v->norm())) {
      std::ostringstream msg;
      msg << "vector is not in " << to_string(which) << " (residual " << off << ")";
      throw Error(ErrorKind::Membership, msg.str());
    }
  }
  const Vec flat = jet.covariant(which, X, Z);
  const Distribution other = which == Distribution::D ? Distribution::Dperp : Distribution::D;
  return dec.distribution(other).project(flat);
}

Vec distribution_sff(const ChartedSubmanifold& sub, const AmbientSpace& space, Distribution which, const Vec& u, const Vec& X,
                     const Vec& Z, const FdScheme& scheme, double tol) {
  const DistributionJet jet = distribution_jet(sub, space, u, scheme, tol);
  const CRDecomposition dec = decomposition_at(sub, space, u, scheme, tol);
  return distribution_sff(jet, dec, which, X, Z);
}

}  // namespace qcr
