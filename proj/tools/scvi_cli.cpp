#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "scvi/acceptance.hpp"
#include "scvi/certify.hpp"
#include "scvi/error.hpp"
#include "scvi/experiment.hpp"
#include "scvi/generators.hpp"
#include "scvi/serialization.hpp"

namespace {

enum Exit { kOk = 0, kFailed = 1, kConfig = 2 };

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw scvi::ConfigError("file_unreadable", "cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw scvi::ConfigError("malformed_json", e.what());
  }
}

int cmd_run(const std::string& path, const std::optional<std::string>& out, const std::optional<std::uint64_t>& seed,
            const std::optional<std::size_t>& reps, std::size_t threads, bool quiet) {
  scvi::ExperimentConfig config = scvi::load_experiment_config(path);
  if (out) config.output_dir = *out;
  if (seed) config.seed = *seed;
  if (reps) {
    if (*reps == 0) throw scvi::ConfigError("replications_not_positive", "--reps must be positive");
    config.replications = *reps;
  }
  scvi::RunOptions opts;
  opts.threads = threads;
  if (!quiet) opts.log = [](const std::string& m) { std::cerr << m << "\n"; };
  const scvi::ExperimentResult result = scvi::run_experiment(config, opts);
  if (!quiet) {
    for (const auto& [name, series] : result.series) {
      if (series.k.empty()) continue;
      std::cout << name << ": k=" << series.k.back() << " mean=" << scvi::format_double(series.mean.back())
                << " se=" << scvi::format_double(series.standard_error.back());
      const auto& fit = result.summary["metrics"][name]["fit"];
      if (fit.contains("slope")) std::cout << " slope=" << scvi::format_double(fit["slope"].get<double>());
      std::cout << "\n";
    }
  }
  return kOk;
}

int cmd_accept(const std::vector<std::string>& only, std::size_t threads, double gamma0_scale,
               const std::optional<std::string>& report, bool quiet) {
  scvi::AcceptanceOptions opts;
  opts.only = only;
  opts.threads = threads;
  opts.gamma0_scale = gamma0_scale;
  const scvi::AcceptanceReport rep = scvi::run_acceptance_suite(opts);
  for (const auto& c : rep.criteria)
    if (!quiet || !c.passed) std::cout << scvi::format_criterion_line(c) << "\n";
  if (report) {
    std::ofstream f(*report);
    f << rep.to_json(false).dump(2) << "\n";
  }
  std::cout << (rep.passed() ? "acceptance: PASS" : "acceptance: FAIL") << "\n";
  return rep.passed() ? kOk : kFailed;
}

int cmd_check(const std::string& path, std::size_t samples, std::uint64_t seed, bool quiet) {
  const nlohmann::json j = read_json(path);
  scvi::ScviProblem problem = [&] {
    try {
      if (j.contains("generator") && j.at("generator").is_string()) return scvi::generate_problem(j.at("generator"), j.value("params", nlohmann::json::object()));
      return scvi::problem_from_json(j);
    } catch (const scvi::ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw scvi::ConfigError("invalid_problem", e.what());
    }
  }();
  const auto mono = scvi::certify_monotonicity(problem, problem.monotonicity(), samples, seed);
  const auto consts = scvi::certify_constants(problem, samples, seed);
  nlohmann::json out = {{"monotonicity", mono.to_json()}, {"constants", consts.to_json()},
                        {"passed", mono.passed && consts.passed()}};
  if (!quiet) std::cout << out.dump(2) << "\n";
  std::cout << "check-problem: " << (mono.passed && consts.passed() ? "PASS" : "FAIL") << " ("
            << scvi::to_string(problem.monotonicity().kind) << ")\n";
  return mono.passed && consts.passed() ? kOk : kFailed;
}

int cmd_generate(const std::string& name, const std::string& params, const std::string& out) {
  nlohmann::json p = nlohmann::json::object();
  if (!params.empty()) {
    try {
      p = nlohmann::json::parse(params);
    } catch (const nlohmann::json::exception& e) {
      throw scvi::ConfigError("malformed_json", e.what());
    }
  }
  scvi::ScviProblem problem = [&] {
    try {
      return scvi::generate_problem(name, p);
    } catch (const scvi::ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw scvi::ConfigError("invalid_problem", e.what());
    }
  }();
  const std::string text = scvi::problem_to_json(problem).dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    std::ofstream f(out);
    f << text;
    if (!f) throw scvi::Error("cannot write '" + out + "'");
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block stochastic mirror-prox experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  bool quiet = false;
  std::size_t threads = 0;
  app.add_flag("-q,--quiet", quiet, "Only print failures and the final status");
  app.add_option("--threads", threads, "Worker threads (0: hardware concurrency)");

  auto* run = app.add_subcommand("run", "Run an experiment config");
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--seed", seed, "Override the master seed");
  run->add_option("--reps", reps, "Override the replication count");

  auto* accept = app.add_subcommand("accept", "Run the acceptance suite");
  std::vector<std::string> only;
  double gamma0_scale = 1.0;
  std::optional<std::string> report;
  accept->add_option("--only", only, "Criterion ids to run (e.g. A1 A5)");
  accept->add_option("--gamma0-scale", gamma0_scale, "Scale the A2 stepsize (mutation check)");
  accept->add_option("--report", report, "Write the JSON report here");

  auto* check = app.add_subcommand("check-problem", "Certify monotonicity class and constants of an instance");
  std::string instance_path;
  std::size_t samples = 10000;
  std::uint64_t check_seed = 0;
  check->add_option("instance", instance_path, "Problem instance or {generator, params} (JSON)")->required();
  check->add_option("--samples", samples, "Sample count");
  check->add_option("--seed", check_seed, "Sampling seed");

  auto* gen = app.add_subcommand("generate", "Write a generated instance as JSON");
  std::string gen_name, gen_params, gen_out;
  gen->add_option("name", gen_name, "Generator name")->required();
  gen->add_option("--params", gen_params, "Generator parameters (JSON object)");
  gen->add_option("-o,--output", gen_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(config_path, out_dir, seed, reps, threads, quiet);
    if (*accept) return cmd_accept(only, threads, gamma0_scale, report, quiet);
    if (*check) return cmd_check(instance_path, samples, check_seed, quiet);
    if (*gen) return cmd_generate(gen_name, gen_params, gen_out);
  } catch (const scvi::ConfigError& e) {
    std::cerr << "config error [" << e.violation() << "]: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kOk;
}
