#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scvi/problem.hpp"
#include "scvi/stepsize.hpp"

namespace scvi {

// Iterations to snapshot: k ∈ {1,2,4,…} ∪ {multiples of ⌈K/linear_count⌉} ∪ extra ∪ {0, K}.
struct CheckpointPlan {
  bool geometric = true;
  std::uint64_t linear_count = 20;
  std::vector<std::uint64_t> extra;

  std::vector<std::uint64_t> iterations(std::uint64_t total) const;
  nlohmann::json to_json() const;
  static CheckpointPlan from_json(const nlohmann::json& j);
};

struct BsmpConfig {
  StepsizeSchedule schedule = StepsizeSchedule::harmonic(1.0);
  std::vector<double> block_probs;  // empty: uniform
  std::optional<double> averaging_exponent;
  std::uint64_t iterations = 0;
  std::uint64_t seed = 0;
  CheckpointPlan checkpoints;
  std::optional<BlockVector> initial_point;  // default: uniform sample from X

  nlohmann::json to_json() const;
};

struct SmpConfig {
  StepsizeSchedule schedule = StepsizeSchedule::inverse_sqrt(1.0);
  double averaging_exponent = 0.0;
  std::uint64_t iterations = 0;
  std::uint64_t seed = 0;
  CheckpointPlan checkpoints;
  std::optional<BlockVector> initial_point;

  nlohmann::json to_json() const;
};

// Throws ConfigError with a named violation.
void validate(const BsmpConfig& config, std::size_t blocks);
void validate(const SmpConfig& config);

struct Checkpoint {
  std::uint64_t k = 0;
  BlockVector iterate;                 // x_k
  std::optional<BlockVector> average;  // x̄_k (B-SMP) or ȳ_k (SMP, k ≥ 1)
  double weight_sum = 0.0;             // S_k or Γ_k
};

struct RunTrace {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::vector<Checkpoint> checkpoints;
  std::vector<std::uint64_t> block_counts;  // B-SMP block selections
  double wall_seconds = 0.0;
  nlohmann::json config;
};

struct BsmpStep {
  BlockVector extrapolated;  // y_{k+1}
  BlockVector next;          // x_{k+1}
};

// One B-SMP iteration on block `block`; the extrapolation draw comes from
// `extra_noise`, the update draw from `main_noise`.
BsmpStep bsmp_step(const ScviProblem& problem, const BlockVector& x, double gamma,
                   std::size_t block, RandomStream& extra_noise, RandomStream& main_noise);

// Called with (k, x_k) for k = 0..K.
using IterationObserver = std::function<void(std::uint64_t, const BlockVector&)>;

RunTrace run_bsmp(const ScviProblem& problem, const BsmpConfig& config,
                  const IterationObserver& observer = {});
RunTrace run_smp(const ScviProblem& problem, const SmpConfig& config,
                 const IterationObserver& observer = {});

enum class RateRegime { StronglyPseudoMonotone, ConvexAveraged };

// γ₀ = d·max L_ω/μ, or γ₀ = γ√d for the averaged convex regime.
double auto_gamma0(const ScviProblem& problem, RateRegime regime, double gamma_factor = 1.0);

std::vector<double> uniform_probabilities(std::size_t blocks);

}  // namespace scvi
