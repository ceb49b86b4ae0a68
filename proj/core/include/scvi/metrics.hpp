#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "scvi/problem.hpp"
#include "scvi/stepsize.hpp"

namespace scvi {

// Σ_i p_i⁻¹ D_i(x^i, y^i)
double lyapunov(std::span<const double> p, std::span<const BlockGeometry> geoms,
                const BlockVector& x, const BlockVector& y);

// Σ_i ‖x^i − y^i‖_i²
double mse(std::span<const BlockGeometry> geoms, const BlockVector& x, const BlockVector& y);
double mse(const BlockVector& x, const BlockVector& y);  // Euclidean blocks

struct RateConstants {
  std::optional<double> mse_rate;  // 𝒜, needs μ
  double averaged_objective_rate = 0.0;  // ℬ
  double gap_rate = 0.0;                 // ℳ
  double gap_noise = 0.0;                // 𝒞
  double theta = 0.0;                    // θ

  nlohmann::json to_json() const;
};

struct RateParameters {
  double averaging_exponent = 0.0;  // r
  double gamma_factor = 1.0;        // γ in γ₀ = γ√d
  double gamma0 = 1.0;              // γ₀ of the inverse-sqrt schedule
};

// θ = Σ_i (C_i² + ν_i²)/μ_ωi + 2 L_i B_i (C_i + ν̃_i)
double theta_constant(const ProblemConstants& c, std::span<const BlockGeometry> geoms);
// 𝒞 = Σ_i (2/μ_ωi)(2C_i² + ν̃_i² + 1.25 ν_i²)
double gap_noise_constant(const ProblemConstants& c, std::span<const BlockGeometry> geoms);

RateConstants rate_constants(const ProblemConstants& c, std::span<const BlockGeometry> geoms,
                             std::span<const double> p, const RateParameters& params);

// 𝒜d/k
double mse_bound(const RateConstants& rc, std::size_t blocks, double k);

// (Σ_{k=0}^K γ_k^r)⁻¹ (2γ_K^{r−1} Σ p_i⁻¹ L_ωi B_i² + θ Σ_{k=0}^K γ_k^{r+1})
double averaged_objective_bound(const ProblemConstants& c, std::span<const BlockGeometry> geoms,
                                std::span<const double> p, const StepsizeSchedule& schedule,
                                double r, std::uint64_t big_k);
// Same bound with Σγ_k^r supplied by the run (the traced S_K).
double averaged_objective_bound(const ProblemConstants& c, std::span<const BlockGeometry> geoms,
                                std::span<const double> p, const StepsizeSchedule& schedule,
                                double r, std::uint64_t big_k, double weight_sum);

// (Σ_{k=0}^{K−1} γ_k^r)⁻¹ (4γ_{K−1}^{r−1} Σ L_ωi B_i² + 𝒞 Σ_{k=0}^{K−1} γ_k^{r+1})
double gap_bound(const ProblemConstants& c, std::span<const BlockGeometry> geoms,
                 const StepsizeSchedule& schedule, double r, std::uint64_t big_k);

// ⌈((3−r)/2)^{2/(1−r)}⌉ and the strict threshold max{that, 3}.
std::uint64_t rate_threshold(double r);

// Right side of the one-step Lyapunov recursion at x_k with reference point x.
double one_step_recursion_rhs(const ScviProblem& problem, std::span<const double> p,
                              const ProblemConstants& c, const BlockVector& xk,
                              const BlockVector& x, double gamma);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

// Least squares of log(value) on log(k) over points with k ≥ k_min.
RateFit fit_rate(std::span<const std::pair<double, double>> points, double k_min = 100.0);

}  // namespace scvi
