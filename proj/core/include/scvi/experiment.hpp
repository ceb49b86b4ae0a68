#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scvi/problem.hpp"
#include "scvi/solvers.hpp"

namespace scvi {

enum class Algorithm { Bsmp, Smp };

struct SolverSpec {
  Algorithm algorithm = Algorithm::Bsmp;
  ScheduleKind schedule = ScheduleKind::Harmonic;
  std::optional<double> gamma0;  // empty: auto
  double gamma_factor = 1.0;     // γ of γ₀ = γ√d
  std::optional<double> averaging_exponent;
  std::vector<double> block_probs;  // empty: uniform
  std::uint64_t iterations = 1000;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string generator;         // generator name, or empty when `instance` is given
  nlohmann::json generator_params = nlohmann::json::object();
  nlohmann::json instance;       // serialized problem (alternative to generator)
  SolverSpec solver;
  std::size_t replications = 1;
  std::uint64_t seed = 0;
  CheckpointPlan checkpoints;
  std::vector<std::string> metrics{"mse"};
  double fit_k_min = 100.0;
  std::string output_dir = ".";

  nlohmann::json to_json() const;
};

// Parses and validates; throws ConfigError with a named violation.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);
// Checks a parsed config against its resolved problem.
void validate(const ExperimentConfig& config, const ScviProblem& problem);

ScviProblem resolve_problem(const ExperimentConfig& config);
double resolve_gamma0(const ExperimentConfig& config, const ScviProblem& problem);

struct MetricSeries {
  std::vector<std::uint64_t> k;
  std::vector<double> mean;
  std::vector<double> standard_error;
  std::vector<std::vector<double>> values;  // [checkpoint][replication]
};

struct ExperimentResult {
  ExperimentConfig config;
  double gamma0 = 0.0;
  std::map<std::string, MetricSeries> series;
  nlohmann::json summary;
  std::string csv;
};

struct RunOptions {
  std::size_t threads = 0;  // 0: hardware concurrency
  bool write_files = true;
  std::function<void(const std::string&)> log;
};

// Deterministic regardless of thread count.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

// Runs fn(0..n-1) on a worker pool; exceptions are rethrown after joining.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

// Replication seed for index `rep` under `master`.
std::uint64_t replication_seed(std::uint64_t master, std::size_t rep);

// Shortest round-trip decimal form.
std::string format_double(double v);

struct MeanAndError {
  double mean = 0.0;
  double standard_error = 0.0;
};
MeanAndError mean_and_error(const std::vector<double>& values);

}  // namespace scvi
