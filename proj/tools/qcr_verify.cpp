#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qcr/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Checks quaternion CR-submanifold characterizations on a charted submanifold of H^m"};
  qcr::RunConfig config;
  double tol = 0.0, fd_step = 0.0;
  int samples = 0;
  std::string format = "text";
  bool list = false;

  app.add_option("--scenario", config.scenario, "catalog name or scenario file");
  auto* tol_opt = app.add_option("--tol", tol, "predicate tolerance");
  auto* step_opt = app.add_option("--fd-step", fd_step, "first-derivative step (the Hessian step is 10x)");
  auto* samples_opt = app.add_option("--samples", samples, "sample points per chart axis");
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"text", "machine"}));
  app.add_option("--seed", config.seed, "seed for the random quantifier samples");
  app.add_option("--threads", config.threads, "worker threads (0 = all cores)");
  app.add_flag("--list-scenarios", list, "print the builtin catalog and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (list) {
    for (const std::string& name : qcr::builtin_names()) std::cout << name << "\t" << qcr::builtin_summary(name) << "\n";
    return 0;
  }
  if (config.scenario.empty()) {
    std::cerr << "error: --scenario is required (see --list-scenarios)\n";
    return 1;
  }
  if (*tol_opt) config.tol = tol;
  if (*step_opt) config.fd_step = fd_step;
  if (*samples_opt) config.samples = samples;
  config.format = format == "machine" ? qcr::ReportFormat::Machine : qcr::ReportFormat::Text;
  return qcr::run(config, std::cout, std::cerr);
}
