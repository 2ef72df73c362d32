#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qcr/error.hpp"
#include "qcr/scenarios.hpp"
#include "support.hpp"

using namespace qcr;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Kind and message of the error thrown by f.
std::pair<ErrorKind, std::string> failure(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return {e.kind(), e.what()};
  }
  FAIL("expected an error");
  return {ErrorKind::Configuration, ""};
}

const char* kPolynomial = R"(name = poly
ambient_m = 1
[chart]
kind = polynomial
dim = 2
domain = -1, 1, -1, 1
term = 1, 0 : 1, 0, 0, 0
term = 0, 1 : 0, 1, 0.5, 0
term = 2, 0 : 0, 0, 0, 1
term = 1, 1 : 0.3, 0, 0, 0
)";

}  // namespace

TEST_CASE("catalog") {
  const std::vector<std::string> names = builtin_names();
  CHECK(names.size() == 13);
  CHECK(names.front() == "qr-linear");
  for (const std::string& n : names) {
    CAPTURE(n);
    const ScenarioSpec spec = builtin(n);
    CHECK(spec.name == n);
    CHECK_FALSE(builtin_summary(n).empty());
    CHECK_NOTHROW(validate_scenario(spec));
    const ChartedSubmanifold sub = instantiate(spec);
    CHECK(sub.ambient_dim == 4 * spec.ambient_m);
    CHECK_FALSE(sub.sample_points.empty());
    for (const Vec& u : sub.sample_points) CHECK(sub.domain.margin(u) >= spec.grid.margin - 1e-12);
  }
  CHECK(failure([] { builtin("no-such-thing"); }).first == ErrorKind::UnknownScenario);
}

TEST_CASE("default sample counts") {
  CHECK(default_counts(1) == std::vector<int>{7});
  CHECK(default_counts(2) == std::vector<int>{7, 7});
  CHECK(default_counts(5) == std::vector<int>{3, 3, 3, 3, 3});
  CHECK(default_counts(8) == std::vector<int>{3, 3, 3, 3, 3, 1, 1, 1});
  CHECK(instantiate(builtin("qr-linear")).sample_points.size() == 243);
  CHECK(instantiate(builtin("sphere")).sample_points.size() == 49);
}

TEST_CASE("grid placement") {
  ScenarioSpec spec = builtin("circle");
  spec.grid.counts = {3};
  spec.grid.margin = 0.5;
  const ChartedSubmanifold c = instantiate(spec);
  REQUIRE(c.sample_points.size() == 3);
  const double lo = c.domain.lo[0], hi = c.domain.hi[0];
  CHECK(c.sample_points[0][0] == doctest::Approx(lo + 0.5));
  CHECK(c.sample_points[1][0] == doctest::Approx(0.5 * (lo + hi)));
  CHECK(c.sample_points[2][0] == doctest::Approx(hi - 0.5));
  spec.grid.counts = {1};
  CHECK(instantiate(spec).sample_points[0][0] == doctest::Approx(0.5 * (lo + hi)));
}

TEST_CASE("random variants") {
  CHECK(random_variant(4) == random_variant(4));
  CHECK_FALSE(random_variant(4) == random_variant(4, 7));
  for (int i = 0; i < 10; ++i) {
    const ScenarioSpec s = random_variant(i);
    CHECK(s.chart.builtin == kRandomFamilies[i % 3]);
    CHECK(s.name == "random-" + std::to_string(i) + "-" + s.chart.builtin);
    CHECK_NOTHROW(validate_scenario(s));
  }
}

TEST_CASE("minimal file equals the builtin") {
  for (const std::string& n : builtin_names()) {
    CAPTURE(n);
    CHECK(parse_scenario("[chart]\nbuiltin = " + n + "\n") == builtin(n));
  }
  CHECK(parse_scenario(read_file(QCR_SCENARIO_DIR "/minimal.scenario")) == builtin("qr-linear"));
}

TEST_CASE("polynomial chart") {
  const ScenarioSpec spec = parse_scenario(kPolynomial);
  CHECK(spec.ambient_m == 1);
  CHECK(spec.chart.terms.size() == 4);
  CHECK_FALSE(spec.declared_ranks);
  const ChartedSubmanifold sub = instantiate(spec);
  Mat linear(4, 2);
  linear << 1, 0, 0, 1, 0, 0.5, 0, 0;
  CHECK(test::max_abs(jacobian(sub, Vec::Zero(2)) - linear) <= 1e-10);
  const Vec u(Eigen::Vector2d(0.2, -0.4));
  Vec expect(4);
  expect << 0.2 + 0.3 * 0.2 * -0.4, -0.4, -0.2, 0.04;
  CHECK((sub(u) - expect).norm() <= 1e-15);
}

TEST_CASE("round trip") {
  std::vector<ScenarioSpec> specs;
  for (const std::string& n : builtin_names()) specs.push_back(builtin(n));
  for (int i = 0; i < 10; ++i) specs.push_back(random_variant(i));
  specs.push_back(parse_scenario(kPolynomial));
  ScenarioSpec tuned = builtin("q-times-helix");
  tuned.grid.counts = {2, 2, 2, 2, 9};
  tuned.grid.margin = 0.0625;
  tuned.tolerances.predicate = 3e-7;
  tuned.tolerances.noise_floor = 1e-5;
  tuned.tolerances.identity = 0.1 + 0.2;
  tuned.tolerances.rank = 1e-9;
  tuned.leaf_charts = {{Distribution::D, {0, 1, 2, 3}}, {Distribution::Dperp, {4}}};
  specs.push_back(tuned);
  for (const char* f : {"/minimal.scenario", "/polynomial-graph.scenario", "/tuned-helix.scenario"})
    specs.push_back(parse_scenario(read_file(std::string(QCR_SCENARIO_DIR) + f)));
  for (const ScenarioSpec& s : specs) {
    CAPTURE(s.name);
    const std::string text = serialize_scenario(s);
    CHECK(parse_scenario(text) == s);
    CHECK(serialize_scenario(parse_scenario(text)) == text);
  }
}

TEST_CASE("syntax errors carry line and column") {
  struct Case {
    const char* text;
    const char* where;
  };
  const Case cases[] = {
      {"[chart]\nbuiltin = qr-linear\ncolour = red\n", "line 3, column 1"},
      {"[chart]\nbuiltin = qr-linear\n[wobble]\n", "line 3, column 2"},
      {"[chart]\nbuiltin = qr-linear\n[grid]\nmargin = 0.3\nmargin = 0.4\n", "line 5, column 1"},
      {"[chart]\nbuiltin = qr-linear\n[grid]\nmargin = 0.3x\n", "line 4, column 10"},
      {"[chart]\nbuiltin = qr-linear\n[grid]\ncounts = 3, , 3\n", "line 4, column 13"},
      {"[chart]\nbuiltin = qr-linear\n[grid]\nmargin = inf\n", "line 4, column 10"},
      {"[chart]\nbuiltin = qr-linear\njust words\n", "line 3, column 1"},
      {"[chart\n", "line 1"},
      {"[chart]\nbuiltin = nothing\n", "line 2, column 11"},
      {"[chart]\nkind = spline\n", "line 2, column 8"},
  };
  for (const Case& c : cases) {
    CAPTURE(c.text);
    const auto [kind, what] = failure([&] { parse_scenario(c.text); });
    CHECK(kind == ErrorKind::Parse);
    CHECK(what.find(c.where) != std::string::npos);
  }
}

TEST_CASE("semantic errors name the field") {
  struct Case {
    std::string text;
    const char* field;
  };
  const std::string head = "[chart]\nbuiltin = qr-linear\n";
  const Case cases[] = {
      {head + "[grid]\nmargin = 0.00001\n", "margin"},
      {head + "[grid]\nmargin = 1.5\n", "margin"},
      {head + "[grid]\ncounts = 3, 3\n", "counts"},
      {head + "[grid]\ncounts = 3, 3, 0, 3, 3\n", "counts"},
      {head + "params = 1, 2\n", "params"},
      {"ambient_m = 3\n" + head, "ambient_m"},
      {"declared_ranks = 2, 3\n" + head, "declared_ranks"},
      {"declared_ranks = 4, 4\n" + head, "declared_ranks"},
      {head + "[tolerances]\npredicate = -1\n", "tolerances"},
      {head + "[leaf_charts]\nd = 0, 9\n", "leaf_charts"},
      {head + "dperp_override = contact\n", "dperp_override"},
      {"name = x\n", "chart"},
      {std::string(kPolynomial) + "term = 1 : 1, 0, 0, 0\n", "term"},
      {std::string(kPolynomial) + "term = 0, 3 : 1, 0\n", "term"},
  };
  for (const Case& c : cases) {
    CAPTURE(c.text);
    const auto [kind, what] = failure([&] { parse_scenario(c.text); });
    CHECK(kind == ErrorKind::Configuration);
    CHECK(what.find(c.field) != std::string::npos);
  }
}

TEST_CASE("resolve by name or path") {
  CHECK(resolve_scenario("sphere") == builtin("sphere"));
  CHECK(resolve_scenario(QCR_SCENARIO_DIR "/tuned-helix.scenario").chart.params == std::vector<double>{0.8, 1.5, 0.3});
  const std::filesystem::path tmp = std::filesystem::temp_directory_path() / "qcr_resolve_test.scenario";
  {
    std::ofstream out(tmp);
    out << serialize_scenario(random_variant(5));
  }
  CHECK(resolve_scenario(tmp.string()) == random_variant(5));
  std::filesystem::remove(tmp);
  CHECK(failure([] { resolve_scenario("/nonexistent/file.scenario"); }).first == ErrorKind::UnknownScenario);
}
