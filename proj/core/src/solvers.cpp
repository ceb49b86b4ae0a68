#include "scvi/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "scvi/averaging.hpp"
#include "scvi/error.hpp"
#include "scvi/serialization.hpp"

namespace scvi {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double max_bound(const ScviProblem& problem) {
  double b = 0.0;
  for (const auto& g : problem.geometries()) b = std::max(b, g.bound());
  return b;
}

void guard(const ScviProblem& problem, const BlockVector& x, double limit) {
  if (!x.values().allFinite()) throw NonFiniteError("iterate became non-finite");
  if (std::sqrt(composite_norm_squared(problem.geometries(), x)) > limit)
    throw DivergenceError("iterate norm exceeded the divergence guard");
}

BlockVector initial_point(const ScviProblem& problem, const std::optional<BlockVector>& given,
                          std::uint64_t seed) {
  if (given) {
    if (given->size() != problem.dim() || !problem.contains(*given, 1e-10))
      throw ConfigError("initial_point_infeasible", "initial point is not in X");
    return problem.make_vector(given->values());
  }
  RandomStream rng(seed, Substream::Initial);
  return problem.sample_point(rng);
}

// In place: block i of x moves to P_i(x^i, γ F_i(y, ξ)) with y the extrapolation.
void bsmp_update(const ScviProblem& problem, BlockVector& x, double gamma, std::size_t i,
                 RandomStream& extra, RandomStream& main) {
  const BlockGeometry& g = problem.geometry(i);
  const Vector xi = x.block(i);
  const Vector f_tilde = sample_block_map(problem, i, x, extra, NoiseChannel::Extra);
  x.block(i) = prox_map(g, xi, gamma * f_tilde);
  const Vector f = sample_block_map(problem, i, x, main, NoiseChannel::Main);
  x.block(i) = prox_map(g, xi, gamma * f);
}

BlockVector prox_all(const ScviProblem& problem, const BlockVector& x, const BlockVector& step) {
  BlockVector out = BlockVector::zeros(problem.layout_ptr());
  for (std::size_t i = 0; i < problem.num_blocks(); ++i)
    out.block(i) = prox_map(problem.geometry(i), x.block(i), step.block(i));
  return out;
}

nlohmann::json optional_point(const std::optional<BlockVector>& x) {
  return x ? vector_to_json(x->values()) : nlohmann::json(nullptr);
}

}  // namespace

std::vector<std::uint64_t> CheckpointPlan::iterations(std::uint64_t total) const {
  std::vector<std::uint64_t> ks{0, total};
  if (geometric)
    for (std::uint64_t k = 1; k <= total; k *= 2) ks.push_back(k);
  if (linear_count > 0 && total > 0) {
    const std::uint64_t step = std::max<std::uint64_t>(1, total / linear_count);
    for (std::uint64_t k = step; k <= total; k += step) ks.push_back(k);
  }
  for (std::uint64_t k : extra)
    if (k <= total) ks.push_back(k);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

nlohmann::json CheckpointPlan::to_json() const {
  return {{"geometric", geometric}, {"linear_count", linear_count}, {"extra", extra}};
}

CheckpointPlan CheckpointPlan::from_json(const nlohmann::json& j) {
  CheckpointPlan p;
  p.geometric = j.value("geometric", p.geometric);
  p.linear_count = j.value("linear_count", p.linear_count);
  p.extra = j.value("extra", p.extra);
  return p;
}

nlohmann::json BsmpConfig::to_json() const {
  nlohmann::json j = {{"algorithm", "bsmp"},
                      {"schedule", schedule.to_json()},
                      {"block_probs", block_probs},
                      {"iterations", iterations},
                      {"seed", seed},
                      {"checkpoints", checkpoints.to_json()},
                      {"initial_point", optional_point(initial_point)}};
  j["averaging_exponent"] = averaging_exponent ? nlohmann::json(*averaging_exponent) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json SmpConfig::to_json() const {
  return {{"algorithm", "smp"},
          {"schedule", schedule.to_json()},
          {"averaging_exponent", averaging_exponent},
          {"iterations", iterations},
          {"seed", seed},
          {"checkpoints", checkpoints.to_json()},
          {"initial_point", optional_point(initial_point)}};
}

std::vector<double> uniform_probabilities(std::size_t blocks) {
  return std::vector<double>(blocks, 1.0 / static_cast<double>(blocks));
}

void validate(const BsmpConfig& config, std::size_t blocks) {
  if (!config.block_probs.empty()) {
    if (config.block_probs.size() != blocks)
      throw ConfigError("block_probs_length", "need one probability per block");
    double sum = 0.0;
    for (double p : config.block_probs) {
      if (!(p > 0.0) || !std::isfinite(p))
        throw ConfigError("block_prob_not_positive", "every block probability must be positive");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw ConfigError("block_probs_not_normalized", "block probabilities must sum to 1");
  }
  if (config.averaging_exponent &&
      (!(*config.averaging_exponent < 1.0) || !std::isfinite(*config.averaging_exponent)))
    throw ConfigError("averaging_exponent_not_below_one", "averaging exponent r must be < 1");
}

void validate(const SmpConfig& config) {
  if (!(config.averaging_exponent < 1.0) || !std::isfinite(config.averaging_exponent))
    throw ConfigError("averaging_exponent_not_below_one", "averaging exponent r must be < 1");
}

BsmpStep bsmp_step(const ScviProblem& problem, const BlockVector& x, double gamma,
                   std::size_t block, RandomStream& extra_noise, RandomStream& main_noise) {
  if (block >= problem.num_blocks()) throw DomainError("block index out of range");
  const BlockGeometry& g = problem.geometry(block);
  BsmpStep out{x, x};
  const Vector f_tilde = sample_block_map(problem, block, x, extra_noise, NoiseChannel::Extra);
  out.extrapolated.block(block) = prox_map(g, x.block(block), gamma * f_tilde);
  const Vector f = sample_block_map(problem, block, out.extrapolated, main_noise, NoiseChannel::Main);
  out.next.block(block) = prox_map(g, x.block(block), gamma * f);
  return out;
}

RunTrace run_bsmp(const ScviProblem& problem, const BsmpConfig& config,
                  const IterationObserver& observer) {
  const auto t0 = Clock::now();
  const std::size_t d = problem.num_blocks();
  validate(config, d);
  const std::vector<double> probs =
      config.block_probs.empty() ? uniform_probabilities(d) : config.block_probs;

  RandomStream block_rng(config.seed, Substream::Block);
  RandomStream extra(config.seed, Substream::ExtraNoise);
  RandomStream main(config.seed, Substream::MainNoise);
  std::discrete_distribution<std::size_t> pick(probs.begin(), probs.end());

  RunTrace trace;
  trace.algorithm = "bsmp";
  trace.seed = config.seed;
  trace.config = config.to_json();
  trace.block_counts.assign(d, 0);

  BlockVector x = initial_point(problem, config.initial_point, config.seed);
  const double limit = 1e3 * max_bound(problem);
  const bool averaging = config.averaging_exponent.has_value();
  const double r = averaging ? *config.averaging_exponent : 0.0;
  WeightedAverager avg;
  if (averaging) avg.add(x.values(), std::pow(config.schedule(0), r));

  const auto plan = config.checkpoints.iterations(config.iterations);
  auto next_cp = plan.begin();
  auto record = [&](std::uint64_t k) {
    if (next_cp == plan.end() || *next_cp != k) return;
    ++next_cp;
    Checkpoint cp{k, x, std::nullopt, 0.0};
    if (averaging) {
      cp.average = problem.make_vector(avg.average());
      cp.weight_sum = avg.weight_sum();
    }
    trace.checkpoints.push_back(std::move(cp));
  };

  if (observer) observer(0, x);
  record(0);
  for (std::uint64_t k = 0; k < config.iterations; ++k) {
    const std::size_t i = pick(block_rng.engine());
    ++trace.block_counts[i];
    bsmp_update(problem, x, config.schedule(k), i, extra, main);
    guard(problem, x, limit);
    if (averaging) avg.add(x.values(), std::pow(config.schedule(k + 1), r));
    if (observer) observer(k + 1, x);
    record(k + 1);
  }
  trace.wall_seconds = seconds_since(t0);
  return trace;
}

RunTrace run_smp(const ScviProblem& problem, const SmpConfig& config,
                 const IterationObserver& observer) {
  const auto t0 = Clock::now();
  validate(config);
  RandomStream extra(config.seed, Substream::ExtraNoise);
  RandomStream main(config.seed, Substream::MainNoise);

  RunTrace trace;
  trace.algorithm = "smp";
  trace.seed = config.seed;
  trace.config = config.to_json();

  BlockVector x = initial_point(problem, config.initial_point, config.seed);
  const double limit = 1e3 * max_bound(problem);
  const double r = config.averaging_exponent;
  WeightedAverager avg(problem.dim());

  const auto plan = config.checkpoints.iterations(config.iterations);
  auto next_cp = plan.begin();
  auto record = [&](std::uint64_t k) {
    if (next_cp == plan.end() || *next_cp != k) return;
    ++next_cp;
    Checkpoint cp{k, x, std::nullopt, avg.weight_sum()};
    if (k > 0) cp.average = problem.make_vector(avg.average());
    trace.checkpoints.push_back(std::move(cp));
  };

  if (observer) observer(0, x);
  record(0);
  for (std::uint64_t k = 0; k < config.iterations; ++k) {
    const double gamma = config.schedule(k);
    BlockVector step = sample_map(problem, x, extra, NoiseChannel::Extra);
    step.values() *= gamma;
    const BlockVector y = prox_all(problem, x, step);
    step = sample_map(problem, y, main, NoiseChannel::Main);
    step.values() *= gamma;
    x = prox_all(problem, x, step);
    guard(problem, x, limit);
    avg.add(y.values(), std::pow(gamma, r));
    if (observer) observer(k + 1, x);
    record(k + 1);
  }
  trace.wall_seconds = seconds_since(t0);
  return trace;
}

double auto_gamma0(const ScviProblem& problem, RateRegime regime, double gamma_factor) {
  const double d = static_cast<double>(problem.num_blocks());
  if (regime == RateRegime::ConvexAveraged) {
    if (!(gamma_factor > 0.0)) throw DomainError("gamma factor must be positive");
    return gamma_factor * std::sqrt(d);
  }
  std::optional<double> mu = problem.constants().modulus;
  if (!mu && problem.monotonicity().modulus > 0.0) mu = problem.monotonicity().modulus;
  if (!mu || !(*mu > 0.0)) throw DomainError("auto gamma0 needs the strong pseudo-monotonicity modulus");
  double lmax = 0.0;
  for (const auto& g : problem.geometries()) lmax = std::max(lmax, g.l_omega());
  return d * lmax / *mu;
}

}  // namespace scvi
