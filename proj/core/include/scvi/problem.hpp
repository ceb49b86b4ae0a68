#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scvi/geometry.hpp"
#include "scvi/mapping.hpp"
#include "scvi/random.hpp"

namespace scvi {

enum class MonotonicityKind {
  Monotone,
  StrictlyMonotone,
  StronglyMonotone,
  PseudoMonotone,
  StrictlyPseudoMonotone,
  StronglyPseudoMonotone,
  ConvexGradient,
};

struct MonotonicityClass {
  MonotonicityKind kind = MonotonicityKind::Monotone;
  double modulus = 0.0;  // μ for the strong variants
};

std::string to_string(MonotonicityKind kind);
MonotonicityKind monotonicity_kind_from_string(const std::string& name);

// Additive Gaussian noise, per-coordinate standard deviations for the
// extrapolation draw (tilde) and the update draw (main).
struct NoiseModel {
  std::vector<double> coord_std;
  std::vector<double> coord_std_tilde;

  static NoiseModel uniform(std::size_t blocks, double std);
  bool is_zero() const;
};

struct ProblemConstants {
  std::vector<double> bound;        // B_i
  std::vector<double> map_bound;    // C_i
  std::vector<double> lipschitz;    // L_i
  std::vector<double> noise;        // ν_i
  std::vector<double> noise_tilde;  // ν̃_i
  std::optional<double> modulus;    // μ
  double global_lipschitz = 0.0;    // ‖F(x) − F(y)‖₂ ≤ L‖x − y‖₂
  std::string method = "analytic";
};

// f(x) = ½ xᵀHx + cᵀx
struct QuadraticObjective {
  Matrix hessian;
  Vector linear;
  double optimal_value = 0.0;

  double value(const Vector& x) const { return 0.5 * x.dot(hessian * x) + linear.dot(x); }
  Vector gradient(const Vector& x) const { return hessian * x + linear; }
};

struct GeneratorRecord {
  std::string name;
  nlohmann::json params;
  std::uint64_t seed = 0;
};

enum class NoiseChannel { Extra, Main };

class ScviProblem {
 public:
  ScviProblem(std::vector<BlockGeometry> geometries, MappingPtr map, NoiseModel noise,
              MonotonicityClass cls);

  std::size_t num_blocks() const { return geometries_.size(); }
  const LayoutPtr& layout_ptr() const { return layout_; }
  const BlockLayout& layout() const { return *layout_; }
  Index dim() const { return layout_->total(); }
  std::span<const BlockGeometry> geometries() const { return geometries_; }
  const BlockGeometry& geometry(std::size_t i) const { return geometries_[i]; }
  const Mapping& map() const { return *map_; }
  const MappingPtr& map_ptr() const { return map_; }
  const NoiseModel& noise() const { return noise_; }
  const MonotonicityClass& monotonicity() const { return class_; }

  const std::optional<BlockVector>& known_solution() const { return solution_; }
  const std::optional<QuadraticObjective>& objective() const { return objective_; }
  const ProblemConstants& constants() const { return constants_; }
  const std::optional<GeneratorRecord>& generator() const { return generator_; }

  void set_known_solution(BlockVector x);
  void set_objective(QuadraticObjective f) { objective_ = std::move(f); }
  void set_constants(ProblemConstants c) { constants_ = std::move(c); }
  void set_generator(GeneratorRecord g) { generator_ = std::move(g); }
  void set_monotonicity(MonotonicityClass c) { class_ = c; }

  BlockVector expected_map(const BlockVector& x) const;
  Vector expected_block(std::size_t i, const BlockVector& x) const;
  bool contains(const BlockVector& x, double tol = 1e-10) const;
  BlockVector project(const BlockVector& x) const;
  BlockVector sample_point(RandomStream& rng) const;
  BlockVector center() const;
  BlockVector make_vector(Vector values) const { return BlockVector(layout_, std::move(values)); }

 private:
  std::vector<BlockGeometry> geometries_;
  LayoutPtr layout_;
  MappingPtr map_;
  NoiseModel noise_;
  MonotonicityClass class_;
  std::optional<BlockVector> solution_;
  std::optional<QuadraticObjective> objective_;
  ProblemConstants constants_;
  std::optional<GeneratorRecord> generator_;
};

// F(x) + w with w ~ N(0, σ_i² I) per block.
BlockVector sample_map(const ScviProblem& problem, const BlockVector& x, RandomStream& stream,
                       NoiseChannel channel = NoiseChannel::Main);
// F_i(x) + w_i; draws only n_i normals.
Vector sample_block_map(const ScviProblem& problem, std::size_t block, const BlockVector& x,
                        RandomStream& stream, NoiseChannel channel = NoiseChannel::Main);

// Operator norm of M from the primal norm `from` to the dual of `to`.
double operator_norm(const Matrix& m, NormKind from, NormKind to);

// Analytic constants for affine and scaled-affine maps.
ProblemConstants analytic_constants(const std::vector<BlockGeometry>& geometries,
                                    const Mapping& map, const NoiseModel& noise,
                                    std::optional<double> modulus);

}  // namespace scvi
