#include <iostream>

#include <CLI11.hpp>

#include "scvi/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria A1-A10"};
  scvi::AcceptanceOptions opts;
  app.add_option("--only", opts.only, "Criterion ids to run");
  app.add_option("--gamma0-scale", opts.gamma0_scale, "Scale the A2 stepsize");
  app.add_option("--threads", opts.threads, "Worker threads");
  CLI11_PARSE(app, argc, argv);

  const scvi::AcceptanceReport report = scvi::run_acceptance_suite(opts);
  for (const auto& c : report.criteria) std::cout << scvi::format_criterion_line(c) << std::endl;
  std::cout << (report.passed() ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL") << std::endl;
  return report.passed() ? 0 : 1;
}
