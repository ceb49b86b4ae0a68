#pragma once

#include <cstdint>

#include <nlohmann/json.hpp>

namespace scvi {

struct RecursionLemmaReport {
  double alpha = 0.0, beta = 0.0, gamma = 0.0, e0 = 0.0;
  std::uint64_t iterations = 0;
  std::uint64_t start = 0;  // ⌈αγ⌉
  bool general_bound_holds = true;
  double general_max_ratio = 0.0;  // max e_k k / max{βγ²/(αγ−1), K e_K}
  bool tight_case = false;         // γ = 2/α
  bool tight_bound_holds = true;
  double max_ratio = 0.0;  // max over k ≥ 2 of e_k k α²/(8β) (tight case)
  std::uint64_t worst_k = 0;
  bool passed() const { return general_bound_holds && tight_bound_holds; }

  nlohmann::json to_json() const;
};

// Worst nonnegative sequence e_{k+1} = max(0, (1 − αγ_k)e_k + βγ_k²), γ_0 = γ, γ_k = γ/k.
RecursionLemmaReport verify_recursion_lemma(double alpha, double beta, double gamma, double e0,
                                            std::uint64_t iterations);

struct StepsizeSumReport {
  double gamma0 = 0.0, r = 0.0;
  std::uint64_t k = 0;
  double sum_r_plus_one = 0.0;  // Σ_{k=0}^{K} γ_k^{r+1}
  double upper_bound = 0.0;
  double sum_r = 0.0;           // Σ_{k=0}^{K−1} γ_k^r
  double lower_bound = 0.0;
  double sum_r_plus_one_head = 0.0;  // Σ_{k=0}^{K−1} γ_k^{r+1}
  double threshold_upper_bound = 0.0;  // 4γ₀^{r+1}(K+1)^{0.5(1−r)}/(1−r)
  std::uint64_t threshold = 0;
  bool threshold_met = false;
  bool upper_holds = true;
  bool lower_holds = true;
  bool threshold_bound_holds = true;  // only meaningful when threshold_met
  bool passed() const { return upper_holds && lower_holds && threshold_bound_holds; }

  nlohmann::json to_json() const;
};

StepsizeSumReport verify_stepsize_sums(double gamma0, double r, std::uint64_t k);

}  // namespace scvi
