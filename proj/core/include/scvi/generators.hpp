#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scvi/problem.hpp"

namespace scvi {

enum class SetKind { UnitBox, SymmetricBox, UnitBall, Simplex, EntropySimplex };

std::string to_string(SetKind kind);
SetKind set_kind_from_string(const std::string& name);
std::vector<BlockGeometry> make_geometries(std::size_t blocks, Index block_size, SetKind kind);

struct StronglyMonotoneAffineParams {
  std::size_t blocks = 2;
  Index block_size = 2;
  double modulus = 0.5;
  double lipschitz_bound = 1.0;
  double noise_std = 0.1;
  double psd_share = 0.5;  // share of L_bound − μ given to the PSD part, rest to the skew part
  SetKind set_kind = SetKind::UnitBox;
  std::uint64_t seed = 1;
};

struct MonotoneAffineParams {
  std::size_t blocks = 3;
  Index block_size = 2;
  double skew_norm = 1.0;
  std::size_t psd_rank = 1;
  double psd_scale = 0.1;
  double noise_std = 0.2;
  SetKind set_kind = SetKind::UnitBox;
  std::uint64_t seed = 1;
};

struct ScopQuadraticParams {
  std::size_t blocks = 3;
  Index block_size = 3;
  std::vector<double> spectrum;  // empty: uniform in [0, curvature_max] with zero_eigenvalues zeros
  double curvature_max = 1.0;
  std::size_t zero_eigenvalues = 1;
  double linear_scale = 1.0;
  double noise_std = 1.0;
  SetKind set_kind = SetKind::UnitBox;
  std::uint64_t seed = 1;
};

struct NashQuadraticParams {
  std::size_t players = 3;
  Index strategy_size = 2;
  double coupling = 0.2;
  double curvature_min = 1.0;
  double curvature_max = 2.0;
  double linear_scale = 1.0;
  double noise_std = 0.1;
  SetKind set_kind = SetKind::UnitBox;
  std::uint64_t seed = 1;
};

// F(x) = A(x − x̄) on the given geometries; x* = x̄ must be feasible.
ScviProblem make_affine_problem(std::vector<BlockGeometry> geometries, Matrix a,
                                const Vector& interior_point, NoiseModel noise,
                                MonotonicityClass cls);

ScviProblem make_strongly_monotone_affine(const StronglyMonotoneAffineParams& params);
ScviProblem make_monotone_affine(const MonotoneAffineParams& params);
ScviProblem make_strictly_pseudo_monotone(const ScviProblem& base);
ScviProblem make_strictly_pseudo_monotone(const ScviProblem& base, SineScaling scaling);
ScviProblem make_scop_quadratic(const ScopQuadraticParams& params);
// Quadratic f with explicit data; f* and a minimizer from a deterministic solve.
ScviProblem make_quadratic_problem(std::vector<BlockGeometry> geometries, Matrix hessian,
                                   Vector linear, NoiseModel noise);
ScviProblem make_nash_quadratic(const NashQuadraticParams& params);

// Registry used by configs and serialized instances; `params` carries the seed.
ScviProblem generate_problem(const std::string& name, const nlohmann::json& params);

void to_json(nlohmann::json& j, const StronglyMonotoneAffineParams& p);
void from_json(const nlohmann::json& j, StronglyMonotoneAffineParams& p);
void to_json(nlohmann::json& j, const MonotoneAffineParams& p);
void from_json(const nlohmann::json& j, MonotoneAffineParams& p);
void to_json(nlohmann::json& j, const ScopQuadraticParams& p);
void from_json(const nlohmann::json& j, ScopQuadraticParams& p);
void to_json(nlohmann::json& j, const NashQuadraticParams& p);
void from_json(const nlohmann::json& j, NashQuadraticParams& p);

}  // namespace scvi
