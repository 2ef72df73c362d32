#include "doctest.h"
#include "oracle.hpp"
#include "qcr/error.hpp"
#include "qcr/scenarios.hpp"
#include "support.hpp"

using namespace qcr;

namespace {

Vec at(double s, double t) { return Vec(Eigen::Vector2d(s, t)); }

}  // namespace

TEST_CASE("brute-force second fundamental form") {
  SUBCASE("plane") {
    const ChartedSubmanifold p = instantiate(builtin("plane"));
    const oracle::SecondForm B = oracle::bruteforce_B(p, at(0.1, -0.3));
    for (const auto& row : B)
      for (const Vec& v : row) CHECK(v.norm() <= 1e-9);
  }
  SUBCASE("circle") {
    const ChartedSubmanifold c = instantiate(builtin("circle"));
    for (double t : {-0.5, 0.0, 0.7}) CHECK(oracle::bruteforce_B(c, Vec::Constant(1, t))[0][0].norm() == doctest::Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("quaternion line times circle at five random points") {
    const ChartedSubmanifold sub = instantiate(builtin("q-times-circle"));
    const AmbientSpace space = make_flat_space(2);
    test::Rng rng(41);
    for (int trial = 0; trial < 5; ++trial) {
      Vec u(5);
      for (int i = 0; i < 5; ++i) u[i] = rng.uniform(-0.7, 0.7);
      const PointGeometry pg = point_geometry(sub, space, u);
      const oracle::SecondForm B = oracle::bruteforce_B(sub, u);
      double worst = 0.0;
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) worst = std::max(worst, (B[i][j] - pg.second_form_coord(i, j)).norm());
      CHECK(worst <= 1e-6);
    }
  }
}

TEST_CASE("flow-commutator bracket") {
  const ChartedSubmanifold flat = instantiate(builtin("totally-real-flat"));
  const oracle::ChartField ds = [](const Vec&) { return at(1, 0); };
  const oracle::ChartField dt = [](const Vec&) { return at(0, 1); };
  const oracle::ChartField s_dt = [](const Vec& u) { return at(0, u[0]); };
  SUBCASE("coordinate fields commute") { CHECK(oracle::bruteforce_bracket(flat, at(0.2, 0.1), ds, dt).norm() <= 1e-12); }
  SUBCASE("textbook bracket") {
    CHECK((oracle::bruteforce_bracket(flat, at(0.2, 0.1), ds, s_dt) - at(0, 1)).norm() <= 1e-4);
    CHECK((oracle::bruteforce_bracket(flat, at(0.2, 0.1), s_dt, ds) - at(0, -1)).norm() <= 1e-4);
  }
  SUBCASE("nonlinear fields") {
    const oracle::ChartField X = [](const Vec& u) { return at(std::sin(u[1]), 1.0); };
    const oracle::ChartField Z = [](const Vec& u) { return at(u[0] * u[1], u[0] * u[0]); };
    const Vec u = at(0.3, -0.2);
    // [X, Z] = DZ X - DX Z in chart coordinates.
    Eigen::Matrix2d DX, DZ;
    DX << 0, std::cos(u[1]), 0, 0;
    DZ << u[1], u[0], 2 * u[0], 0;
    const Vec expect = DZ * X(u) - DX * Z(u);
    CHECK((oracle::bruteforce_bracket(flat, u, X, Z) - expect).norm() <= 1e-4);
  }
  SUBCASE("leaving the chart") {
    try {
      oracle::bruteforce_bracket(flat, at(flat.domain.hi[0] - 1e-3, 0.0), ds, s_dt, 0.1);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Domain);
    }
  }
  SUBCASE("totally real torus frame closes") {
    const ChartedSubmanifold torus = instantiate(builtin("totally-real-torus"));
    const AmbientSpace space = make_flat_space(2);
    for (std::size_t i = 0; i < torus.sample_points.size(); i += 16) {
      const Vec& u = torus.sample_points[i];
      const CRDecomposition dec = decomposition_at(torus, space, u);
      const DistributionJet jet = distribution_jet(torus, space, u);
      const Vec X = dec.Dperp.vector(0), Z = dec.Dperp.vector(1);
      const oracle::ChartField Xf = oracle::distribution_field(torus, space, Distribution::Dperp, jet.chart_coords(X));
      const oracle::ChartField Zf = oracle::distribution_field(torus, space, Distribution::Dperp, jet.chart_coords(Z));
      const Vec br = jet.jac * oracle::bruteforce_bracket(torus, u, Xf, Zf);
      CHECK(dec.Dperp.residual(br) <= 1e-4);
    }
  }
  SUBCASE("contact planes do not close") {
    const ChartedSubmanifold contact = instantiate(builtin("contact-fixture"));
    const AmbientSpace space = make_flat_space(3);
    const Vec& u = contact.sample_points[contact.sample_points.size() / 2];
    const CRDecomposition dec = decomposition_at(contact, space, u);
    REQUIRE(dec.rank_Dperp() == 2);
    const DistributionJet jet = distribution_jet(contact, space, u);
    const Vec X = dec.Dperp.vector(0), Z = dec.Dperp.vector(1);
    const oracle::ChartField Xf = oracle::distribution_field(contact, space, Distribution::Dperp, jet.chart_coords(X));
    const oracle::ChartField Zf = oracle::distribution_field(contact, space, Distribution::Dperp, jet.chart_coords(Z));
    const Vec br = jet.jac * oracle::bruteforce_bracket(contact, u, Xf, Zf);
    CHECK(dec.Dperp.residual(br) >= 0.1);
    CHECK((br - jet.bracket(Distribution::Dperp, X, Z)).norm() <= 1e-4);
  }
}

TEST_CASE("oracles agree with the pipeline on the catalog") {
  std::vector<ScenarioSpec> specs;
  for (const std::string& name : builtin_names()) specs.push_back(builtin(name));
  for (int i = 0; i < 10; ++i) specs.push_back(random_variant(i));
  for (const ScenarioSpec& spec : specs) {
    CAPTURE(spec.name);
    const oracle::Agreement a = oracle::pipeline_agreement(instantiate(spec), make_flat_space(spec.ambient_m));
    CHECK(a.b_points > 0);
    CHECK(a.b_deviation <= 1e-6);
    CHECK(a.bracket_deviation <= 1e-4);
  }
}
