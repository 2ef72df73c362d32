#include <algorithm>
#include <cmath>

#include "qcr/error.hpp"
#include "qcr/immersion.hpp"

namespace qcr {

Mat accurate_metric(const ChartedSubmanifold& sub, const Vec& u, double step) {
  if (sub.domain.margin(u) < 2.0 * step) throw Error(ErrorKind::Margin, sub.name + ": curvature stencil leaves the chart domain");
  auto f = [&sub](const Vec& v) { return sub(v); };
  Mat J(sub.ambient_dim, sub.k);
  for (int i = 0; i < sub.k; ++i) J.col(i) = fd::first4(f, u, i, step);
  return J.transpose() * J;
}

Tensor4 riemann_tensor(const ChartedSubmanifold& sub, const Vec& u, const FdScheme& scheme) {
  const int k = sub.k;
  const double H = scheme.curvature_step;
  auto metric = [&](const Vec& v) -> Mat { return accurate_metric(sub, v, scheme.field_step); };
  const Mat g = metric(u);
  const Mat ginv = g.inverse();

  std::vector<Mat> dg(static_cast<std::size_t>(k));
  for (int m = 0; m < k; ++m) dg[static_cast<std::size_t>(m)] = fd::first4(metric, u, m, H);
  // d2g[a * k + b] = d_a d_b g
  std::vector<Mat> d2g(static_cast<std::size_t>(k * k));
  for (int a = 0; a < k; ++a)
    for (int b = a; b < k; ++b) {
      const Mat v = fd::second4(metric, u, a, b, H);
      d2g[static_cast<std::size_t>(a * k + b)] = v;
      d2g[static_cast<std::size_t>(b * k + a)] = v;
    }
  auto dd = [&](int a, int b, int i, int j) { return d2g[static_cast<std::size_t>(a * k + b)](i, j); };
  auto d = [&](int a, int i, int j) { return dg[static_cast<std::size_t>(a)](i, j); };
  // Gamma_{m, ij} with the first index lowered
  Tensor3 low(k, k, k);
  for (int m = 0; m < k; ++m)
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) low(m, i, j) = 0.5 * (d(i, j, m) + d(j, i, m) - d(m, i, j));

  Tensor4 Rm(k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
          double v = 0.5 * (dd(i, a, j, b) + dd(j, b, i, a) - dd(i, b, j, a) - dd(j, a, i, b));
          for (int m = 0; m < k; ++m)
            for (int p = 0; p < k; ++p) v += ginv(m, p) * (low(m, j, b) * low(p, i, a) - low(m, i, b) * low(p, j, a));
          Rm(i, j, a, b) = v;
        }
  return Rm;
}

double riemann_value(const Tensor4& Rm, const PointGeometry& pg, const Vec& X, const Vec& Y, const Vec& Z, const Vec& U) {
  const Vec a = pg.chart_coords(X), b = pg.chart_coords(Y), c = pg.chart_coords(Z), d = pg.chart_coords(U);
  const int k = Rm.dim();
  double v = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      const double ab = a[i] * b[j];
      if (ab == 0.0) continue;
      for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q) v += ab * c[p] * d[q] * Rm(i, j, p, q);
    }
  return v;
}

namespace {

double gauss_defect(const PointGeometry& pg, const Tensor4& Rm, const Vec& X, const Vec& Y, const Vec& Z, const Vec& U) {
  const double intrinsic = riemann_value(Rm, pg, X, Y, Z, U);
  const double extrinsic = pg.second_form(X, Z).dot(pg.second_form(Y, U)) - pg.second_form(Y, Z).dot(pg.second_form(X, U));
  return std::abs(0.0 - intrinsic - extrinsic);
}

}  // namespace

double gauss_equation_residual(const ChartedSubmanifold& sub, const AmbientSpace& space, const Vec& u, const Vec& X,
                               const Vec& Y, const Vec& Z, const Vec& U, const FdScheme& scheme) {
  if (space.c != 0.0) throw Error(ErrorKind::Inapplicable, "the Gauss check needs the flat ambient");
  const PointGeometry pg = point_geometry(sub, space, u, scheme);
  for (const Vec* v : {&X, &Y, &Z, &U})
    if (!pg.is_tangent(*v)) throw Error(ErrorKind::ProjectionDomain, "Gauss check arguments must be tangent");
  return gauss_defect(pg, riemann_tensor(sub, u, scheme), X, Y, Z, U);
}

double gauss_equation_residual_all(const PointGeometry& pg, const Tensor4& Rm) {
  const int k = pg.k();
  double worst = 0.0;
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      for (int c = 0; c < k; ++c)
        for (int d = 0; d < k; ++d)
          worst = std::max(worst, gauss_defect(pg, Rm, pg.tangent_basis.col(a), pg.tangent_basis.col(b),
                                               pg.tangent_basis.col(c), pg.tangent_basis.col(d)));
  return worst;
}

}  // namespace qcr
