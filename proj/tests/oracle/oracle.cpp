#include "oracle.hpp"

#include <algorithm>

#include "qcr/error.hpp"

namespace qcr::oracle {

namespace {

/// Second derivative of f along direction v, extrapolated from steps h, h/2.
Vec second_directional(const ChartedSubmanifold& sub, const Vec& u, const Vec& v, double h) {
  const Vec f0 = sub(u);
  auto diff = [&](double s) { return Vec((sub(u + s * v) - 2.0 * f0 + sub(u - s * v)) / (s * s)); };
  return (4.0 * diff(0.5 * h) - diff(h)) / 3.0;
}

Mat richardson_jacobian(const ChartedSubmanifold& sub, const Vec& u, double h) {
  Mat J(sub.ambient_dim, sub.k);
  for (int i = 0; i < sub.k; ++i) {
    const Vec e = Vec::Unit(sub.k, i);
    auto d = [&](double s) { return Vec((sub(u + s * e) - sub(u - s * e)) / (2.0 * s)); };
    J.col(i) = (4.0 * d(0.5 * h) - d(h)) / 3.0;
  }
  return J;
}

}  // namespace

SecondForm bruteforce_B(const ChartedSubmanifold& sub, const Vec& u, double base_step) {
  const double h = 0.5 * base_step;
  const Mat J = richardson_jacobian(sub, u, 1e-4);
  const Mat G = J.transpose() * J;
  const Mat P = Mat::Identity(sub.ambient_dim, sub.ambient_dim) - J * G.ldlt().solve(J.transpose());

  SecondForm B(static_cast<std::size_t>(sub.k), std::vector<Vec>(static_cast<std::size_t>(sub.k)));
  for (int i = 0; i < sub.k; ++i) {
    const Vec ei = Vec::Unit(sub.k, i);
    B[i][i] = P * second_directional(sub, u, ei, h);
    for (int j = 0; j < i; ++j) {
      const Vec ej = Vec::Unit(sub.k, j);
      const Vec mixed = 0.25 * (second_directional(sub, u, ei + ej, h) - second_directional(sub, u, ei - ej, h));
      B[i][j] = B[j][i] = P * mixed;
    }
  }
  return B;
}

ChartField distribution_field(const ChartedSubmanifold& sub, const AmbientSpace& space, Distribution which, const Vec& c) {
  return [&sub, &space, which, c](const Vec& u) {
    const TangentFrame tf = tangent_frame(sub, u);
    const Mat* override_ptr = nullptr;
    Mat override_vectors;
    if (sub.dperp_override) {
      override_vectors = sub.dperp_override(u);
      override_ptr = &override_vectors;
    }
    const CRDecomposition dec = extract_cr(tf, space, 1e-8, override_ptr);
    const Vec Z = dec.distribution(which).project(tf.jac * c);
    return Vec(tf.metric.ldlt().solve(tf.jac.transpose() * Z));
  };
}

namespace {

Vec rk4_flow(const ChartedSubmanifold& sub, const ChartField& F, const Vec& u, double t, int steps) {
  Vec x = u;
  const double dt = t / steps;
  auto field = [&](const Vec& p) {
    if (sub.domain.margin(p) < 0.0) throw Error(ErrorKind::Domain, sub.name + ": flow left the chart domain");
    return F(p);
  };
  for (int s = 0; s < steps; ++s) {
    const Vec k1 = field(x);
    const Vec k2 = field(x + 0.5 * dt * k1);
    const Vec k3 = field(x + 0.5 * dt * k2);
    const Vec k4 = field(x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

Vec commutator(const ChartedSubmanifold& sub, const Vec& u, const ChartField& X, const ChartField& Z, double t) {
  constexpr int steps = 4;
  Vec p = rk4_flow(sub, X, u, t, steps);
  p = rk4_flow(sub, Z, p, t, steps);
  p = rk4_flow(sub, X, p, -t, steps);
  p = rk4_flow(sub, Z, p, -t, steps);
  return (p - u) / (t * t);
}

}  // namespace

Vec bruteforce_bracket(const ChartedSubmanifold& sub, const Vec& u, const ChartField& X, const ChartField& Z, double h) {
  auto symmetric = [&](double t) { return Vec(0.5 * (commutator(sub, u, X, Z, t) + commutator(sub, u, X, Z, -t))); };
  return (4.0 * symmetric(0.5 * h) - symmetric(h)) / 3.0;
}

Agreement pipeline_agreement(const ChartedSubmanifold& sub, const AmbientSpace& space, int points, int pairs) {
  Agreement out;
  const int n = static_cast<int>(sub.sample_points.size());
  const int count = std::min(points, n);
  for (int s = 0; s < count; ++s) {
    const Vec& u = sub.sample_points[static_cast<std::size_t>(count > 1 ? s * (n - 1) / (count - 1) : 0)];
    const PointGeometry pg = point_geometry(sub, space, u);
    const SecondForm B = bruteforce_B(sub, u);
    for (int i = 0; i < sub.k; ++i)
      for (int j = 0; j < sub.k; ++j) out.b_deviation = std::max(out.b_deviation, (B[i][j] - pg.second_form_coord(i, j)).norm());
    ++out.b_points;

    const CRDecomposition dec = decomposition_at(sub, space, u);
    const DistributionJet jet = distribution_jet(sub, space, u);
    for (Distribution which : {Distribution::D, Distribution::Dperp}) {
      const Subspace& dist = dec.distribution(which);
      int taken = 0;
      for (int a = 0; a < dist.rank() && taken < pairs; ++a)
        for (int b = a + 1; b < dist.rank() && taken < pairs; ++b, ++taken) {
          const Vec X = dist.vector(a), Z = dist.vector(b);
          const ChartField Xf = distribution_field(sub, space, which, jet.chart_coords(X));
          const ChartField Zf = distribution_field(sub, space, which, jet.chart_coords(Z));
          const Vec flow = pg.jac * bruteforce_bracket(sub, u, Xf, Zf);
          out.bracket_deviation = std::max(out.bracket_deviation, (flow - jet.bracket(which, X, Z)).norm());
          ++out.brackets;
        }
    }
  }
  return out;
}

}  // namespace qcr::oracle
