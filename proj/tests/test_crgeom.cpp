#include "doctest.h"
#include "oracle.hpp"
#include "qcr/crgeom.hpp"
#include "qcr/error.hpp"
#include "qcr/sample_table.hpp"
#include "qcr/scenarios.hpp"
#include "support.hpp"

using namespace qcr;

namespace {

template <class F>
ErrorKind error_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Configuration;
}

ChartedSubmanifold quaternion_line() {
  ChartedSubmanifold s;
  s.name = "quaternion-line";
  s.k = 4;
  s.ambient_dim = 8;
  s.domain = Box{Vec::Constant(4, -1.0), Vec::Constant(4, 1.0)};
  s.eval = [](const Vec& u) {
    Vec x = Vec::Zero(8);
    x.head(4) = u;
    return x;
  };
  s.sample_points = {Vec::Zero(4), Vec::Constant(4, 0.3)};
  return s;
}

/// Tangent space contains a quaternion line at t = 0 only.
ChartedSubmanifold rank_jump() {
  ChartedSubmanifold s;
  s.name = "rank-jump";
  s.k = 5;
  s.ambient_dim = 8;
  s.domain = Box{Vec::Constant(5, -1.0), Vec::Constant(5, 1.0)};
  s.eval = [](const Vec& u) {
    Vec x = Vec::Zero(8);
    x.head(4) = u.head(4);
    x[4] = u[4] * u[4];
    x[5] = u[4] * u[0];
    x[6] = u[4];
    return x;
  };
  Vec other = Vec::Zero(5);
  other[4] = 0.5;
  s.sample_points = {Vec::Zero(5), other};
  return s;
}

const std::vector<std::string> kCrScenarios{"qr-linear",        "q-times-circle",  "totally-real-flat", "totally-real-torus",
                                            "twisted-product",  "linear-product",  "q-times-helix",     "rotating-product"};

}  // namespace

TEST_CASE("extract_cr examples") {
  const AmbientSpace s2 = make_flat_space(2);
  SUBCASE("quaternion submanifold") {
    const ChartedSubmanifold q = quaternion_line();
    const CRDecomposition dec = extract_cr(point_geometry(q, s2, Vec::Zero(4)), s2);
    CHECK(dec.is_cr);
    CHECK(dec.rank_D() == 4);
    CHECK(dec.rank_Dperp() == 0);
    CHECK(dec.mu.rank() == 4);
    CHECK(dec.mu_perp.rank() == 0);
  }
  SUBCASE("totally real plane") {
    const ChartedSubmanifold p = instantiate(builtin("totally-real-flat"));
    const CRDecomposition dec = decomposition_at(p, s2, p.sample_points[0]);
    CHECK(dec.is_cr);
    CHECK(dec.rank_D() == 0);
    CHECK(dec.rank_Dperp() == 2);
    CHECK(dec.mu_perp.rank() == 6);
  }
  SUBCASE("quaternion line times circle") {
    const ChartedSubmanifold c = instantiate(builtin("q-times-circle"));
    const CRDecomposition dec = decomposition_at(c, s2, c.sample_points[7]);
    CHECK(dec.rank_D() == 4);
    CHECK(dec.rank_Dperp() == 1);
    CHECK(dec.mu_perp.rank() == 3);
    CHECK(dec.mu.rank() == 0);
  }
  SUBCASE("complex line is not CR") {
    const ChartedSubmanifold c = instantiate(builtin("complex-line"));
    const AmbientSpace s1 = make_flat_space(1);
    const CRDecomposition dec = decomposition_at(c, s1, c.sample_points[0]);
    CHECK_FALSE(dec.is_cr);
    CHECK(dec.totally_real_residual > 0.5);
    CHECK(error_kind([&] { CrSampleTable::build(c, s1); }) == ErrorKind::NotTotallyReal);
  }
  SUBCASE("rank change across sample points") {
    const ChartedSubmanifold r = rank_jump();
    CHECK(decomposition_at(r, s2, r.sample_points[0]).rank_D() == 4);
    CHECK(decomposition_at(r, s2, r.sample_points[1]).rank_D() == 0);
    CHECK(error_kind([&] { CrSampleTable::build(r, s2); }) == ErrorKind::NonConstantRank);
    TableOptions lenient;
    lenient.strict = false;
    CHECK_FALSE(CrSampleTable::build(r, s2, lenient).constant_ranks());
  }
}

TEST_CASE("CR invariants on the catalog") {
  for (const std::string& name : kCrScenarios) {
    CAPTURE(name);
    const ScenarioSpec spec = builtin(name);
    const ChartedSubmanifold sub = instantiate(spec);
    const AmbientSpace space = make_flat_space(spec.ambient_m);
    for (std::size_t i = 0; i < sub.sample_points.size(); i += 23) {
      const CRDecomposition dec = decomposition_at(sub, space, sub.sample_points[i]);
      REQUIRE(dec.is_cr);
      CHECK(dec.rank_D() + dec.rank_Dperp() == sub.k);
      CHECK(dec.rank_D() % 4 == 0);
      CHECK(dec.mu_perp.rank() == 3 * dec.rank_Dperp());
      CHECK(dec.mu.rank() + dec.mu_perp.rank() == space.dim() - sub.k);
      if (dec.rank_D() && dec.rank_Dperp()) CHECK(test::max_abs(dec.D.basis().transpose() * dec.Dperp.basis()) <= 1e-9);
      CHECK(dec.invariance_residual <= 1e-8);
      CHECK(dec.totally_real_residual <= 1e-8);
      CHECK(dec.direct_sum_sigma >= 0.1);
      for (int a = 1; a <= 3; ++a)
        for (int c = 0; c < dec.rank_D(); ++c) CHECK(dec.D.residual(space.triple.J(a) * dec.D.vector(c)) <= 1e-8);
      if (spec.declared_ranks) {
        CHECK(dec.rank_D() == spec.declared_ranks->first);
        CHECK(dec.rank_Dperp() == spec.declared_ranks->second);
      }
    }
  }
}

TEST_CASE("project") {
  const AmbientSpace s2 = make_flat_space(2);
  const ChartedSubmanifold c = instantiate(builtin("q-times-circle"));
  const PointGeometry pg = point_geometry(c, s2, c.sample_points[12]);
  const CRDecomposition dec = extract_cr(pg, s2);
  test::Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec v = pg.tangent_projector() * rng.gaussian(8);
    const Vec q = project(dec, v, Distribution::D), qp = project(dec, v, Distribution::Dperp);
    CHECK((q + qp - v).norm() <= 1e-10);
    CHECK(project(dec, q, Distribution::Dperp).norm() <= 1e-10);
    CHECK((project(dec, q, Distribution::D) - q).norm() <= 1e-10);
    CHECK(std::abs(q.squaredNorm() + qp.squaredNorm() - v.squaredNorm()) <= 1e-9);
  }
  CHECK(error_kind([&] { project(dec, pg.normal_basis.col(0), Distribution::D); }) == ErrorKind::ProjectionDomain);
}

TEST_CASE("quaternionic frame") {
  const QuaternionTriple t = make_quaternion_triple(3);
  const ChartedSubmanifold sub = instantiate(builtin("linear-product"));
  const AmbientSpace s3 = make_flat_space(3);
  const CRDecomposition dec = decomposition_at(sub, s3, sub.sample_points[0]);
  const std::vector<Vec> frame = quaternionic_frame(dec.D, t);
  REQUIRE(frame.size() == 4);
  Mat F(12, 4);
  for (int i = 0; i < 4; ++i) F.col(i) = frame[i];
  CHECK(test::max_abs(F.transpose() * F - Mat::Identity(4, 4)) <= 1e-12);
  for (int a = 1; a <= 3; ++a) CHECK((t.J(a) * frame[0] - frame[a]).norm() <= 1e-12);
  for (const Vec& e : frame) CHECK(dec.D.residual(e) <= 1e-10);

  const Subspace H2(8, Mat::Identity(8, 8), 0);
  const std::vector<Vec> full = quaternionic_frame(H2, make_quaternion_triple(2));
  REQUIRE(full.size() == 8);
  CHECK((full[0] - Vec::Unit(8, 0)).norm() <= 1e-15);
  CHECK((full[4] - Vec::Unit(8, 4)).norm() <= 1e-15);
}

TEST_CASE("distribution second fundamental forms") {
  const AmbientSpace s2 = make_flat_space(2);
  SUBCASE("linear product vanishes") {
    const ChartedSubmanifold s1 = instantiate(builtin("qr-linear"));
    const Vec& u = s1.sample_points[40];
    const CRDecomposition dec = decomposition_at(s1, s2, u);
    const Vec w = dec.Dperp.vector(0);
    CHECK(distribution_sff(s1, s2, Distribution::Dperp, u, w, w).norm() <= 1e-9);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        CHECK(distribution_sff(s1, s2, Distribution::D, u, dec.D.vector(a), dec.D.vector(b)).norm() <= 1e-9);
  }
  SUBCASE("quaternion line times circle") {
    const ChartedSubmanifold c = instantiate(builtin("q-times-circle"));
    const Vec& u = c.sample_points[33];
    const CRDecomposition dec = decomposition_at(c, s2, u);
    const Vec w = dec.Dperp.vector(0);
    CHECK(distribution_sff(c, s2, Distribution::Dperp, u, w, w).norm() <= 1e-7);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        CHECK(distribution_sff(c, s2, Distribution::D, u, dec.D.vector(a), dec.D.vector(b)).norm() <= 1e-7);
  }
  SUBCASE("membership") {
    const ChartedSubmanifold c = instantiate(builtin("q-times-circle"));
    const Vec& u = c.sample_points[33];
    const CRDecomposition dec = decomposition_at(c, s2, u);
    CHECK(error_kind([&] { distribution_sff(c, s2, Distribution::Dperp, u, dec.D.vector(0), dec.Dperp.vector(0)); }) ==
          ErrorKind::Membership);
  }
  SUBCASE("h is the Dperp part of the covariant derivative") {
    const ScenarioSpec spec = random_variant(2);
    const ChartedSubmanifold sub = instantiate(spec);
    const AmbientSpace s3 = make_flat_space(spec.ambient_m);
    const Vec& u = sub.sample_points[4];
    const DistributionJet jet = distribution_jet(sub, s3, u);
    const CRDecomposition dec = decomposition_at(sub, s3, u);
    const Vec X = dec.D.vector(0);
    const Vec Z = dec.D.vector(1);
    // Flat derivative of the extension of Z, differentiated independently.
    const oracle::ChartField field = oracle::distribution_field(sub, s3, Distribution::D, jet.chart_coords(Z));
    const Vec a = jet.chart_coords(X);
    const double h = 1e-3;
    auto ambient = [&](const Vec& v) { return Vec(jacobian(sub, v) * field(v)); };
    const Vec coarse = (ambient(u + h * a) - ambient(u - h * a)) / (2 * h);
    const Vec fine = (ambient(u + 0.5 * h * a) - ambient(u - 0.5 * h * a)) / h;
    const Vec flat = (4.0 * fine - coarse) / 3.0;
    CHECK((jet.covariant(Distribution::D, X, Z) - flat).norm() <= 1e-6);
    const Vec h_sff = distribution_sff(jet, dec, Distribution::D, X, Z);
    CHECK((h_sff - dec.Dperp.project(flat)).norm() <= 1e-6);
  }
}

TEST_CASE("sample table") {
  const ScenarioSpec spec = builtin("q-times-circle");
  const ChartedSubmanifold sub = instantiate(spec);
  const AmbientSpace space = make_flat_space(2);
  TableOptions serial;
  serial.threads = 1;
  TableOptions parallel = serial;
  parallel.threads = 4;
  const CrSampleTable a = CrSampleTable::build(sub, space, serial);
  const CrSampleTable b = CrSampleTable::build(sub, space, parallel);
  REQUIRE(a.points().size() == b.points().size());
  CHECK(a.rank_D() == 4);
  CHECK(a.rank_Dperp() == 1);
  CHECK(a.is_cr());
  CHECK(a.mu_vanishes());
  for (std::size_t i = 0; i < a.points().size(); ++i) {
    const SamplePoint &p = a.points()[i], &q = b.points()[i];
    CHECK(p.index == static_cast<int>(i));
    for (int d = 0; d < 2; ++d) {
      REQUIRE(p.random[d].size() == q.random[d].size());
      for (std::size_t j = 0; j < p.random[d].size(); ++j) CHECK(p.random[d][j] == q.random[d][j]);
    }
    CHECK(p.P_D == q.P_D);
  }
  const SamplePoint& p = a.points()[5];
  CHECK(test::max_abs(p.P_D + p.P_Dperp - p.P_T) <= 1e-10);
  for (const Vec& v : p.random_of(Distribution::D)) {
    CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((p.P_D * v - v).norm() <= 1e-10);
  }
}

TEST_CASE("normal sampler is reproducible") {
  NormalSampler a(7), b(7), c(8);
  for (int i = 0; i < 10; ++i) {
    const double x = a.normal();
    CHECK(x == b.normal());
    CHECK(x != c.normal());
  }
  NormalSampler d(9);
  double mean = 0.0, sq = 0.0;
  constexpr int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = d.normal();
    mean += x / n;
    sq += x * x / n;
  }
  CHECK(std::abs(mean) < 0.05);
  CHECK(std::abs(sq - 1.0) < 0.05);
}
