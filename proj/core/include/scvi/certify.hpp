#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scvi/problem.hpp"

namespace scvi {

struct MonotonicityCertificate {
  MonotonicityKind kind = MonotonicityKind::Monotone;
  double modulus = 0.0;
  std::size_t samples = 0;
  std::size_t premise_pairs = 0;  // pairs where the pseudo-monotone premise held
  bool passed = true;
  // Smallest tested quantity: ⟨F(x)−F(y),x−y⟩ (or ⟨F(x),x−y⟩ for pseudo
  // variants), divided by ‖x−y‖² for the strong variants.
  double worst_margin = 0.0;
  std::optional<std::pair<BlockVector, BlockVector>> violating_pair;

  nlohmann::json to_json() const;
};

MonotonicityCertificate certify_monotonicity(const ScviProblem& problem, MonotonicityClass cls,
                                             std::size_t samples, std::uint64_t seed = 0);

struct ConstantsCertificate {
  std::string method;
  std::size_t samples = 0;
  std::vector<double> sampled_map_bound;  // max ‖F_i(x)‖_{*i}
  std::vector<double> sampled_lipschitz;  // max ‖F_i(x)−F_i(x')‖_{*i}/‖x^i−x'^i‖_i
  bool map_bound_ok = true;
  bool lipschitz_ok = true;
  bool passed() const { return map_bound_ok && lipschitz_ok; }

  nlohmann::json to_json() const;
};

ConstantsCertificate certify_constants(const ScviProblem& problem, std::size_t samples = 10000,
                                       std::uint64_t seed = 0);

// Sampling-only constants, used for maps without an analytic path.
ProblemConstants sampled_constants(const ScviProblem& problem, std::size_t samples,
                                   std::uint64_t seed, double safety = 1.1);

}  // namespace scvi
