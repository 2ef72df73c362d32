#include "qcr/immersion.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qcr/error.hpp"

namespace qcr {

std::string_view to_string(Distribution d) noexcept { return d == Distribution::D ? "D" : "Dperp"; }

double Box::margin(const Vec& u) const {
  if (u.size() != lo.size()) throw Error(ErrorKind::Shape, "chart point has wrong dimension");
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim(); ++i) m = std::min({m, u[i] - lo[i], hi[i] - u[i]});
  return m;
}

LeafChart coordinate_leaf(Distribution which, std::vector<int> axes) {
  LeafChart leaf;
  leaf.which = which;
  leaf.dim = static_cast<int>(axes.size());
  leaf.axes = axes;
  leaf.to_chart = [axes](const Vec& base, const Vec& v) {
    Vec w = base;
    for (std::size_t i = 0; i < axes.size(); ++i) w[axes[i]] += v[static_cast<Eigen::Index>(i)];
    return w;
  };
  return leaf;
}

Vec ChartedSubmanifold::operator()(const Vec& u) const {
  if (u.size() != k) throw Error(ErrorKind::Shape, name + ": chart point must have " + std::to_string(k) + " coordinates");
  Vec x = eval(u);
  if (x.size() != ambient_dim) throw Error(ErrorKind::Shape, name + ": chart returned a vector of the wrong length");
  if (!x.allFinite()) throw Error(ErrorKind::Evaluation, name + ": chart produced a non-finite value");
  return x;
}

const LeafChart* ChartedSubmanifold::leaf(Distribution which) const {
  for (const LeafChart& l : leaf_charts)
    if (l.which == which) return &l;
  return nullptr;
}

ChartedSubmanifold leaf_submanifold(const ChartedSubmanifold& sub, const LeafChart& leaf, const Vec& base, double half_width) {
  ChartedSubmanifold out;
  out.name = sub.name + "/" + std::string(to_string(leaf.which)) + "-leaf";
  out.k = leaf.dim;
  out.ambient_dim = sub.ambient_dim;
  out.domain = Box{Vec::Constant(leaf.dim, -half_width), Vec::Constant(leaf.dim, half_width)};
  auto to_chart = leaf.to_chart;
  auto eval = sub.eval;
  out.eval = [to_chart, eval, base](const Vec& v) { return eval(to_chart(base, v)); };
  out.sample_points = {Vec::Zero(leaf.dim)};
  return out;
}

Mat jacobian(const ChartedSubmanifold& sub, const Vec& u, const FdScheme& scheme) {
  const double h = scheme.first_step;
  if (sub.domain.margin(u) < 2.0 * h) {
    std::ostringstream msg;
    msg << sub.name << ": point is " << sub.domain.margin(u) << " from the boundary, stencil needs " << 2.0 * h;
    throw Error(ErrorKind::Margin, msg.str());
  }
  Mat J(sub.ambient_dim, sub.k);
  auto f = [&sub](const Vec& v) { return sub(v); };
  for (int i = 0; i < sub.k; ++i) J.col(i) = fd::first(f, u, i, h, scheme.richardson);
  return J;
}

TangentFrame tangent_frame_from_jacobian(Mat jac) {
  const int n = static_cast<int>(jac.rows());
  const int k = static_cast<int>(jac.cols());
  Eigen::JacobiSVD<Mat> svd(jac);
  const Vec& s = svd.singularValues();
  const double smax = s.size() ? s[0] : 0.0;
  const double smin = s.size() ? s[s.size() - 1] : 0.0;
  if (k > n || !(smin > 1e-8 * smax) || smin < 1e-12) {
    std::ostringstream msg;
    msg << "Jacobian is rank deficient, smallest singular value " << smin;
    throw Error(ErrorKind::ImmersionFailure, msg.str());
  }
  Eigen::HouseholderQR<Mat> qr(jac);
  Mat Q = qr.householderQ() * Mat::Identity(n, n);
  const Mat R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (int i = 0; i < k; ++i)
    if (R(i, i) < 0) Q.col(i) = -Q.col(i);
  TangentFrame tf;
  tf.tangent = Q.leftCols(k);
  tf.normal = Q.rightCols(n - k);
  tf.metric = jac.transpose() * jac;
  tf.jac = std::move(jac);
  return tf;
}

TangentFrame tangent_frame(const ChartedSubmanifold& sub, const Vec& u, const FdScheme& scheme) {
  return tangent_frame_from_jacobian(jacobian(sub, u, scheme));
}

Vec PointGeometry::chart_coords(const Vec& X) const { return inverse_metric * (jac.transpose() * X); }

Vec PointGeometry::second_form_coord(int i, int j) const {
  Vec b = Vec::Zero(ambient_dim());
  for (int a = 0; a < normal_basis.cols(); ++a) b += B(i, j, a) * normal_basis.col(a);
  return b;
}

Vec PointGeometry::second_form(const Vec& X, const Vec& Y) const {
  const Vec a = chart_coords(X);
  const Vec b = chart_coords(Y);
  const int nn = static_cast<int>(normal_basis.cols());
  Vec comps = Vec::Zero(nn);
  for (int i = 0; i < k(); ++i)
    for (int j = 0; j < k(); ++j) {
      const double w = a[i] * b[j];
      if (w == 0.0) continue;
      for (int c = 0; c < nn; ++c) comps[c] += w * B(i, j, c);
    }
  return normal_basis * comps;
}

bool PointGeometry::is_tangent(const Vec& v, double tol) const {
  const Vec n = normal_basis.transpose() * v;
  return n.norm() <= tol * std::max(1.0, v.norm());
}

PointGeometry point_geometry(const ChartedSubmanifold& sub, const AmbientSpace& space, const Vec& u, const FdScheme& scheme) {
  if (sub.ambient_dim != space.dim()) throw Error(ErrorKind::Shape, sub.name + ": ambient dimension does not match the space");
  TangentFrame tf = tangent_frame(sub, u, scheme);
  const int k = sub.k;
  const int nn = sub.ambient_dim - k;

  PointGeometry pg;
  pg.u = u;
  pg.jac = tf.jac;
  pg.tangent_basis = tf.tangent;
  pg.normal_basis = tf.normal;
  pg.induced_metric = tf.metric;
  pg.inverse_metric = tf.metric.inverse();

  auto metric_at = [&](const Vec& v) -> Mat {
    const Mat J = jacobian(sub, v, scheme);
    return J.transpose() * J;
  };
  std::vector<Mat> dg(static_cast<std::size_t>(k));
  for (int m = 0; m < k; ++m) dg[static_cast<std::size_t>(m)] = fd::richardson(metric_at, u, m, scheme.field_step);

  pg.christoffel = Tensor3(k, k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      Vec lower(k);
      for (int m = 0; m < k; ++m)
        lower[m] = 0.5 * (dg[static_cast<std::size_t>(i)](j, m) + dg[static_cast<std::size_t>(j)](i, m) -
                          dg[static_cast<std::size_t>(m)](i, j));
      const Vec upper = pg.inverse_metric * lower;
      for (int l = 0; l < k; ++l) pg.christoffel(l, i, j) = upper[l];
    }

  auto f = [&sub](const Vec& v) { return sub(v); };
  pg.B = Tensor3(k, k, nn);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      const Vec H = fd::second_extrapolated(f, u, i, j, scheme.second_step, scheme.richardson);
      const Vec comps = pg.normal_basis.transpose() * H;
      for (int a = 0; a < nn; ++a) {
        pg.B(i, j, a) = comps[a];
        pg.B(j, i, a) = comps[a];
      }
    }
  return pg;
}

ShapeOperatorValue shape_operator(const PointGeometry& pg, const Vec& N) {
  if (N.size() != pg.ambient_dim()) throw Error(ErrorKind::Shape, "shape operator: normal vector has wrong length");
  const double tangential = (pg.tangent_basis.transpose() * N).norm();
  if (tangential > 1e-8 * std::max(1.0, N.norm())) {
    std::ostringstream msg;
    msg << "vector has tangential component " << tangential;
    throw Error(ErrorKind::NotNormal, msg.str());
  }
  const int k = pg.k();
  ShapeOperatorValue out{N, Mat(k, k)};
  for (int a = 0; a < k; ++a)
    for (int b = a; b < k; ++b) {
      const double v = pg.second_form(pg.tangent_basis.col(a), pg.tangent_basis.col(b)).dot(N);
      out.matrix(a, b) = v;
      out.matrix(b, a) = v;
    }
  return out;
}

Vec apply_shape_operator(const PointGeometry& pg, const Vec& N, const Vec& X) {
  const ShapeOperatorValue A = shape_operator(pg, N);
  return pg.tangent_basis * (A.matrix * (pg.tangent_basis.transpose() * X));
}

NormalDerivative normal_connection_along(const ChartedSubmanifold& sub, const AmbientSpace& space, const Vec& u,
                                         const ChartVectorField& N_field, const Vec& a, const FdScheme& scheme) {
  if (sub.ambient_dim != space.dim()) throw Error(ErrorKind::Shape, sub.name + ": ambient dimension does not match the space");
  if (a.size() != sub.k) throw Error(ErrorKind::Shape, "normal_connection: direction has wrong length");
  auto checked = [&](const Vec& v) -> Vec {
    const Vec N = N_field(v);
    const TangentFrame tf = tangent_frame(sub, v, scheme);
    const double drift = (tf.tangent.transpose() * N).norm();
    if (drift > 1e-6 * std::max(1.0, N.norm())) {
      std::ostringstream msg;
      msg << "normal field has tangential component " << drift << " on the stencil";
      throw Error(ErrorKind::Drift, msg.str());
    }
    return N;
  };
  checked(u);
  const double h = scheme.field_step;
  const Vec coarse = (checked(u + h * a) - checked(u - h * a)) / (2.0 * h);
  const Vec fine = (checked(u + 0.5 * h * a) - checked(u - 0.5 * h * a)) / h;
  const TangentFrame tf = tangent_frame(sub, u, scheme);
  NormalDerivative out;
  out.flat = (4.0 * fine - coarse) / 3.0;
  out.tangential = tf.tangent * (tf.tangent.transpose() * out.flat);
  out.nabla_perp = out.flat - out.tangential;
  return out;
}

NormalDerivative normal_connection(const ChartedSubmanifold& sub, const AmbientSpace& space, const Vec& u,
                                   const ChartVectorField& N_field, int direction, const FdScheme& scheme) {
  if (direction < 0 || direction >= sub.k) throw Error(ErrorKind::Index, "normal_connection: direction out of range");
  return normal_connection_along(sub, space, u, N_field, Vec::Unit(sub.k, direction), scheme);
}

}  // namespace qcr
