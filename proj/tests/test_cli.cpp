#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qcr/runner.hpp"
#include "qcr/scenarios.hpp"

using namespace qcr;

namespace {

struct Run {
  int exit_code = -1;
  std::string out;
};

Run run_cli(const std::string& args) {
  const std::string cmd = std::string(QCR_VERIFY_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

std::string temp_file(const std::string& name, const std::string& text) {
  const std::filesystem::path p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p.string();
}

}  // namespace

TEST_CASE("machine reports are byte-identical across runs") {
  const Run a = run_cli("--scenario q-times-circle --format machine --threads 1");
  const Run b = run_cli("--scenario q-times-circle --format machine --threads 1");
  const Run c = run_cli("--scenario q-times-circle --format machine --threads 4");
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
  CHECK(contains(a.out, "dperp_geodesic\tfalse\t1.000000e+00\tp"));
  CHECK(contains(a.out, "exit_code\t0\t-\t-\n"));
  std::istringstream lines(a.out);
  std::string line;
  while (std::getline(lines, line)) {
    CAPTURE(line);
    CHECK(std::count(line.begin(), line.end(), '\t') == 3);
  }
}

TEST_CASE("exit code contract") {
  SUBCASE("linear product passes") {
    const Run r = run_cli("--scenario qr-linear");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "Thm 3.1: EQUIVALENT (4/4 true)"));
    CHECK(contains(r.out, "ruled (Thm 4.2): true (4/4 true)"));
  }
  SUBCASE("quaternion line times circle") {
    const Run r = run_cli("--scenario q-times-circle");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "mixed geodesic: true"));
    CHECK(contains(r.out, "ruled (Thm 4.2): false (4/4 false)"));
    CHECK(contains(r.out, "Thm 6.3 conditions: i true, ii false, iii true"));
  }
  SUBCASE("corrupted fixture fails") {
    const Run r = run_cli("--scenario contact-fixture --format machine");
    CHECK(r.exit_code == 2);
    CHECK(contains(r.out, "dperp_integrable\tfalse"));
  }
  SUBCASE("non-CR submanifold fails") { CHECK(run_cli("--scenario complex-line").exit_code == 2); }
  SUBCASE("tolerance below the noise floor is inconclusive") {
    const Run r = run_cli("--scenario qr-linear --tol 1e-300 --format machine");
    CHECK(r.exit_code == 3);
    CHECK(contains(r.out, "\tinconclusive\t"));
  }
  SUBCASE("declared ranks that do not match fail") {
    const std::string path = temp_file("qcr_cli_ranks.scenario", "declared_ranks = 0, 2\n[chart]\nbuiltin = totally-real-flat\n");
    CHECK(run_cli("--scenario " + path).exit_code == 0);
    const std::string bad = temp_file("qcr_cli_badranks.scenario", "declared_ranks = 4, -2\n[chart]\nbuiltin = totally-real-flat\n");
    CHECK(run_cli("--scenario " + bad).exit_code == 1);
    const std::string wrong = temp_file("qcr_cli_wrongranks.scenario", "declared_ranks = 0, 5\n[chart]\nbuiltin = qr-linear\n");
    const Run r = run_cli("--scenario " + wrong + " --format machine");
    CHECK(r.exit_code == 2);
    CHECK(contains(r.out, "property:declared_ranks\tfalse"));
  }
  SUBCASE("configuration errors") {
    CHECK(run_cli("--scenario no-such-scenario").exit_code == 1);
    CHECK(run_cli("--scenario qr-linear --tol -1").exit_code == 1);
    CHECK(run_cli("--scenario qr-linear --fd-step 0").exit_code == 1);
    CHECK(run_cli("--scenario qr-linear --format xml").exit_code == 1);
    CHECK(run_cli("--scenario qr-linear --bogus").exit_code == 1);
    CHECK(run_cli("").exit_code == 1);
    const std::string broken = temp_file("qcr_cli_broken.scenario", "[chart]\nbuiltin = qr-linear\ncolour = red\n");
    const Run r = run_cli("--scenario " + broken);
    CHECK(r.exit_code == 1);
    CHECK(contains(r.out, "line 3"));
  }
}

TEST_CASE("listing and overrides") {
  const Run list = run_cli("--list-scenarios");
  CHECK(list.exit_code == 0);
  for (const std::string& n : builtin_names()) CHECK(contains(list.out, n + "\t"));
  const Run small = run_cli("--scenario sphere --samples 3 --format machine");
  CHECK(small.exit_code == 0);
  CHECK(contains(run_cli("--scenario sphere --samples 3").out, "9 sample points"));
  CHECK(run_cli("--scenario sphere --fd-step 2e-5").exit_code == 0);
  CHECK(run_cli("--scenario sphere --seed 5 --format machine").out != "");
  CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("in-process runner") {
  RunConfig config;
  config.scenario = "q-times-circle";
  config.format = ReportFormat::Machine;
  const VerificationReport r = verify(resolve_scenario(config.scenario), config);
  CHECK(r.exit_code == 0);
  CHECK(r.is_cr);
  CHECK(r.sample_count == 243);
  REQUIRE(r.predicate("dperp_geodesic"));
  CHECK(r.predicate("dperp_geodesic")->verdict == Verdict::False);
  REQUIRE(r.property("totally_geodesic_foliation_equivalence"));
  CHECK(r.property("totally_geodesic_foliation_equivalence")->verdict == Verdict::True);
  CHECK(r.predicate("no_such_predicate") == nullptr);
  std::ostringstream out, err;
  CHECK(run(config, out, err) == 0);
  CHECK(out.str() == r.machine());

  RunConfig bad = config;
  bad.samples = 0;
  std::ostringstream o2, e2;
  CHECK(run(bad, o2, e2) == 1);
  CHECK_FALSE(e2.str().empty());
}
