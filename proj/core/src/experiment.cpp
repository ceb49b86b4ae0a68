#include "scvi/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

#include "scvi/error.hpp"
#include "scvi/gap.hpp"
#include "scvi/generators.hpp"
#include "scvi/metrics.hpp"
#include "scvi/serialization.hpp"

namespace scvi {

using nlohmann::json;

namespace {

const std::set<std::string> kMetrics{"mse", "lyapunov", "mse_average", "objective_gap", "gap"};

const std::set<std::string> kTopKeys{"name",   "problem",     "solver",  "replications", "seed",
                                     "checkpoints", "metrics", "fit_k_min", "output_dir"};

std::string algorithm_name(Algorithm a) { return a == Algorithm::Bsmp ? "bsmp" : "smp"; }

bool gap_applicable(const ScviProblem& problem) {
  switch (problem.monotonicity().kind) {
    case MonotonicityKind::Monotone:
    case MonotonicityKind::StrictlyMonotone:
    case MonotonicityKind::StronglyMonotone:
    case MonotonicityKind::ConvexGradient:
      return true;
    default:
      break;
  }
  if (const auto* aff = problem.map().as_affine()) {
    const Matrix s = 0.5 * (aff->matrix() + aff->matrix().transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -1e-12;
  }
  return false;
}

bool averaged(const ExperimentConfig& c) {
  return c.solver.algorithm == Algorithm::Smp || c.solver.averaging_exponent.has_value();
}

double averaging_r(const ExperimentConfig& c) {
  return c.solver.averaging_exponent.value_or(0.0);
}

}  // namespace

json ExperimentConfig::to_json() const {
  json problem;
  if (!generator.empty())
    problem = {{"generator", generator}, {"params", generator_params}};
  else
    problem = {{"instance", instance}};
  json s = {{"algorithm", algorithm_name(solver.algorithm)},
            {"schedule", scvi::to_string(solver.schedule)},
            {"gamma_factor", solver.gamma_factor},
            {"iterations", solver.iterations}};
  s["gamma0"] = solver.gamma0 ? json(*solver.gamma0) : json("auto");
  s["averaging_exponent"] = solver.averaging_exponent ? json(*solver.averaging_exponent) : json(nullptr);
  s["block_probs"] = solver.block_probs.empty() ? json("uniform") : json(solver.block_probs);
  return {{"name", name},
          {"problem", problem},
          {"solver", s},
          {"replications", replications},
          {"seed", seed},
          {"checkpoints", checkpoints.to_json()},
          {"metrics", metrics},
          {"fit_k_min", fit_k_min},
          {"output_dir", output_dir}};
}

ExperimentConfig parse_experiment_config(const json& j) {
  if (!j.is_object()) throw ConfigError("malformed_config", "config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!kTopKeys.count(key)) throw ConfigError("unknown_key", "unrecognized key '" + key + "'");
  ExperimentConfig c;
  try {
    c.name = j.value("name", c.name);
    const json& p = j.at("problem");
    if (p.contains("generator")) {
      c.generator = p.at("generator").get<std::string>();
      c.generator_params = p.value("params", json::object());
    } else if (p.contains("instance")) {
      c.instance = p.at("instance");
    } else {
      throw ConfigError("problem_missing", "problem needs a generator or an instance");
    }
    const json& s = j.at("solver");
    const std::string algo = s.value("algorithm", "bsmp");
    if (algo == "bsmp")
      c.solver.algorithm = Algorithm::Bsmp;
    else if (algo == "smp")
      c.solver.algorithm = Algorithm::Smp;
    else
      throw ConfigError("unknown_algorithm", "algorithm '" + algo + "' is not recognized");
    const std::string default_schedule = c.solver.algorithm == Algorithm::Smp ? "inverse_sqrt" : "harmonic";
    c.solver.schedule = schedule_kind_from_string(s.value("schedule", default_schedule));
    if (s.contains("gamma0") && !(s.at("gamma0").is_string() && s.at("gamma0") == "auto"))
      c.solver.gamma0 = s.at("gamma0").get<double>();
    c.solver.gamma_factor = s.value("gamma_factor", 1.0);
    if (s.contains("averaging_exponent") && !s.at("averaging_exponent").is_null())
      c.solver.averaging_exponent = s.at("averaging_exponent").get<double>();
    if (s.contains("block_probs") && !s.at("block_probs").is_string())
      c.solver.block_probs = s.at("block_probs").get<std::vector<double>>();
    const json& iters = s.at("iterations");
    if (iters.is_number_integer() && iters.get<std::int64_t>() < 0)
      throw ConfigError("iterations_negative", "iterations must be nonnegative");
    c.solver.iterations = iters.get<std::uint64_t>();
    const json& reps = j.value("replications", json(1));
    if (!reps.is_number_integer() || reps.get<std::int64_t>() < 1)
      throw ConfigError("replications_not_positive", "replications must be a positive integer");
    c.replications = reps.get<std::size_t>();
    c.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("checkpoints")) c.checkpoints = CheckpointPlan::from_json(j.at("checkpoints"));
    c.metrics = j.value("metrics", c.metrics);
    c.fit_k_min = j.value("fit_k_min", c.fit_k_min);
    c.output_dir = j.value("output_dir", c.output_dir);
  } catch (const json::exception& e) {
    throw ConfigError("malformed_config", e.what());
  }
  if (c.metrics.empty()) throw ConfigError("metrics_empty", "at least one metric is required");
  for (const auto& m : c.metrics)
    if (!kMetrics.count(m)) throw ConfigError("unknown_metric", "metric '" + m + "' is not recognized");
  if (c.solver.gamma0 && (!(*c.solver.gamma0 > 0.0) || !std::isfinite(*c.solver.gamma0)))
    throw ConfigError("stepsize_not_positive", "gamma0 must be positive");
  if (!(c.solver.gamma_factor > 0.0))
    throw ConfigError("stepsize_not_positive", "gamma_factor must be positive");
  if (c.solver.averaging_exponent && !(*c.solver.averaging_exponent < 1.0))
    throw ConfigError("averaging_exponent_not_below_one", "averaging exponent r must be < 1");
  if (c.solver.algorithm == Algorithm::Bsmp && !c.solver.averaging_exponent &&
      c.solver.schedule != ScheduleKind::Harmonic)
    throw ConfigError("schedule_not_square_summable",
                      "B-SMP without averaging needs the harmonic (square-summable, non-summable) schedule");
  if (c.solver.algorithm == Algorithm::Smp && !c.solver.block_probs.empty())
    throw ConfigError("block_probs_unused", "SMP updates every block; block_probs is not accepted");
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config_unreadable", "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed_config", e.what());
  }
  return parse_experiment_config(j);
}

ScviProblem resolve_problem(const ExperimentConfig& config) {
  try {
    if (!config.generator.empty()) return generate_problem(config.generator, config.generator_params);
    return problem_from_json(config.instance);
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError("invalid_problem", e.what());
  } catch (const Error& e) {
    throw ConfigError("invalid_problem", e.what());
  }
}

double resolve_gamma0(const ExperimentConfig& config, const ScviProblem& problem) {
  if (config.solver.gamma0) return *config.solver.gamma0;
  try {
    if (config.solver.algorithm == Algorithm::Smp) return config.solver.gamma_factor;
    if (config.solver.schedule == ScheduleKind::Harmonic)
      return auto_gamma0(problem, RateRegime::StronglyPseudoMonotone);
    return auto_gamma0(problem, RateRegime::ConvexAveraged, config.solver.gamma_factor);
  } catch (const DomainError& e) {
    throw ConfigError("gamma0_auto_unavailable", e.what());
  }
}

void validate(const ExperimentConfig& config, const ScviProblem& problem) {
  for (const auto& g : problem.geometries())
    if (!std::isfinite(g.bound())) throw ConfigError("set_bound_not_finite", "component sets must be bounded");
  if (config.solver.algorithm == Algorithm::Bsmp) {
    BsmpConfig bc;
    bc.block_probs = config.solver.block_probs;
    bc.averaging_exponent = config.solver.averaging_exponent;
    validate(bc, problem.num_blocks());
  }
  for (const auto& m : config.metrics) {
    if ((m == "mse" || m == "lyapunov" || m == "mse_average") && !problem.known_solution())
      throw ConfigError("metric_unavailable", "metric '" + m + "' needs a known solution");
    if (m == "mse_average" && !averaged(config))
      throw ConfigError("metric_unavailable", "metric 'mse_average' needs averaging");
    if (m == "objective_gap" && !problem.objective())
      throw ConfigError("metric_unavailable", "metric 'objective_gap' needs an objective");
    if (m == "gap" && !gap_applicable(problem))
      throw ConfigError("metric_unavailable", "metric 'gap' needs a monotone problem");
  }
  resolve_gamma0(config, problem);
}

std::uint64_t replication_seed(std::uint64_t master, std::size_t rep) {
  return derive_seed(master, 0x7265706cULL, rep);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

MeanAndError mean_and_error(const std::vector<double>& values) {
  MeanAndError out;
  const std::size_t n = values.size();
  if (n == 0) return out;
  double s = 0.0;
  for (double v : values) s += v;
  out.mean = s / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.standard_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  }
  return out;
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const ScviProblem problem = resolve_problem(config);
  validate(config, problem);
  ExperimentResult result;
  result.config = config;
  result.gamma0 = resolve_gamma0(config, problem);
  const double g0 = result.gamma0;
  const SolverSpec& sv = config.solver;
  const StepsizeSchedule schedule = sv.schedule == ScheduleKind::Harmonic ? StepsizeSchedule::harmonic(g0)
                                    : sv.schedule == ScheduleKind::InverseSqrt
                                        ? StepsizeSchedule::inverse_sqrt(g0)
                                        : StepsizeSchedule::constant(g0);
  const std::vector<double> probs =
      sv.block_probs.empty() ? uniform_probabilities(problem.num_blocks()) : sv.block_probs;
  const auto ks = config.checkpoints.iterations(sv.iterations);
  const std::size_t reps = config.replications;
  const std::size_t nm = config.metrics.size();
  const GapMethod gap_method = default_gap_method(problem);
  const bool has_avg = averaged(config);

  // slots[rep][metric][checkpoint]; NaN marks "not defined at this k".
  std::vector<std::vector<std::vector<double>>> slots(
      reps, std::vector<std::vector<double>>(nm, std::vector<double>(ks.size(), std::nan(""))));
  std::vector<std::vector<double>> weight_sums(reps, std::vector<double>(ks.size(), 0.0));

  if (options.log)
    options.log("running " + std::to_string(reps) + " replications of " + algorithm_name(sv.algorithm) +
                " for K=" + std::to_string(sv.iterations));
  parallel_for(reps, options.threads, [&](std::size_t rep) {
    const std::uint64_t seed = replication_seed(config.seed, rep);
    RunTrace trace;
    if (sv.algorithm == Algorithm::Bsmp) {
      BsmpConfig bc{schedule, probs, sv.averaging_exponent, sv.iterations, seed, config.checkpoints, std::nullopt};
      trace = run_bsmp(problem, bc);
    } else {
      SmpConfig sc{schedule, averaging_r(config), sv.iterations, seed, config.checkpoints, std::nullopt};
      trace = run_smp(problem, sc);
    }
    for (std::size_t c = 0; c < trace.checkpoints.size(); ++c) {
      const Checkpoint& cp = trace.checkpoints[c];
      weight_sums[rep][c] = cp.weight_sum;
      const BlockVector* point = has_avg ? (cp.average ? &*cp.average : nullptr) : &cp.iterate;
      for (std::size_t m = 0; m < nm; ++m) {
        const std::string& name = config.metrics[m];
        double v = std::nan("");
        if (name == "mse") {
          v = mse(problem.geometries(), cp.iterate, *problem.known_solution());
        } else if (name == "lyapunov") {
          v = lyapunov(probs, problem.geometries(), cp.iterate, *problem.known_solution());
        } else if (name == "mse_average") {
          if (cp.average) v = mse(problem.geometries(), *cp.average, *problem.known_solution());
        } else if (name == "objective_gap") {
          if (point) {
            const auto& f = *problem.objective();
            v = f.value(point->values()) - f.optimal_value;
          }
        } else if (name == "gap") {
          if (point) v = gap_function(problem, *point, gap_method);
        }
        slots[rep][m][c] = v;
      }
    }
  });

  // Theory side.
  RateParameters rp;
  rp.averaging_exponent = averaging_r(config);
  rp.gamma_factor = sv.gamma_factor;
  rp.gamma0 = g0;
  std::optional<RateConstants> rc;
  try {
    rc = rate_constants(problem.constants(), problem.geometries(), probs, rp);
  } catch (const Error&) {
  }

  std::ostringstream csv;
  csv << "# " << config.to_json().dump() << "\n";
  csv << "run_id,replication,k,metric,value\n";
  for (std::size_t rep = 0; rep < reps; ++rep)
    for (std::size_t c = 0; c < ks.size(); ++c)
      for (std::size_t m = 0; m < nm; ++m) {
        const double v = slots[rep][m][c];
        if (std::isnan(v)) continue;
        csv << config.name << ',' << rep << ',' << ks[c] << ',' << config.metrics[m] << ','
            << format_double(v) << '\n';
      }
  result.csv = csv.str();

  json metrics_json = json::object();
  for (std::size_t m = 0; m < nm; ++m) {
    const std::string& name = config.metrics[m];
    MetricSeries series;
    std::vector<std::pair<double, double>> fit_points;
    json bound_json = json::array();
    for (std::size_t c = 0; c < ks.size(); ++c) {
      std::vector<double> vals;
      for (std::size_t rep = 0; rep < reps; ++rep)
        if (!std::isnan(slots[rep][m][c])) vals.push_back(slots[rep][m][c]);
      if (vals.empty()) continue;
      const MeanAndError me = mean_and_error(vals);
      series.k.push_back(ks[c]);
      series.mean.push_back(me.mean);
      series.standard_error.push_back(me.standard_error);
      series.values.push_back(vals);
      if (ks[c] > 0) fit_points.emplace_back(static_cast<double>(ks[c]), me.mean);
      const double k = static_cast<double>(ks[c]);
      json b = nullptr;
      if (name == "mse" && sv.algorithm == Algorithm::Bsmp && sv.schedule == ScheduleKind::Harmonic &&
          rc && rc->mse_rate && ks[c] > 0) {
        b = mse_bound(*rc, problem.num_blocks(), k);
      } else if (name == "objective_gap" && sv.algorithm == Algorithm::Bsmp && sv.averaging_exponent) {
        b = averaged_objective_bound(problem.constants(), problem.geometries(), probs, schedule,
                                     *sv.averaging_exponent, ks[c], weight_sums[0][c]);
      } else if (name == "gap" && sv.algorithm == Algorithm::Smp && ks[c] > 0) {
        b = gap_bound(problem.constants(), problem.geometries(), schedule, averaging_r(config), ks[c]);
      }
      bound_json.push_back(b);
    }
    json fit_json = nullptr;
    try {
      const RateFit fit = fit_rate(fit_points, config.fit_k_min);
      fit_json = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"points", fit.points}};
    } catch (const DomainError& e) {
      fit_json = {{"error", e.what()}};
    }
    metrics_json[name] = {{"k", series.k},
                          {"mean", series.mean},
                          {"standard_error", series.standard_error},
                          {"bound", bound_json},
                          {"fit", fit_json}};
    result.series[name] = std::move(series);
  }

  result.summary = {{"config", config.to_json()},
                    {"master_seed", config.seed},
                    {"gamma0", g0},
                    {"problem", problem_to_json(problem)},
                    {"metrics", metrics_json}};
  result.summary["rate_constants"] = rc ? rc->to_json() : json(nullptr);
  if (sv.algorithm == Algorithm::Smp && rc) {
    json m = json::array();
    const std::uint64_t thr = rate_threshold(averaging_r(config));
    for (std::uint64_t k : ks)
      m.push_back(k > thr ? json(rc->gap_rate / std::sqrt(static_cast<double>(k))) : json(nullptr));
    result.summary["gap_rate_bound"] = m;
  }

  if (options.write_files) {
    namespace fs = std::filesystem;
    const fs::path dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
    const fs::path csv_path = dir / (config.name + ".csv");
    const fs::path json_path = dir / (config.name + ".summary.json");
    std::ofstream out_csv(csv_path, std::ios::binary);
    out_csv << result.csv;
    std::ofstream out_json(json_path, std::ios::binary);
    out_json << result.summary.dump(2) << "\n";
    if (!out_csv || !out_json) throw Error("failed writing experiment output to '" + dir.string() + "'");
    if (options.log) options.log("wrote " + csv_path.string() + " and " + json_path.string());
  }
  return result;
}

}  // namespace scvi
