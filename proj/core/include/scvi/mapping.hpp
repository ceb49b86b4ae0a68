#pragma once

#include <memory>

#include <nlohmann/json.hpp>

#include "scvi/block_vector.hpp"

namespace scvi {

class AffineMapping;

// Deterministic map F : R^n → R^n on the concatenated vector.
class Mapping {
 public:
  virtual ~Mapping() = default;

  virtual Index dim() const = 0;
  virtual Vector value(const Vector& x) const = 0;
  // Rows [offset, offset + size) of F(x).
  virtual Vector block_value(Index offset, Index size, const Vector& x) const;
  // J(x)ᵀ v; central differences unless overridden.
  virtual Vector jacobian_transpose_apply(const Vector& x, const Vector& v) const;
  virtual const AffineMapping* as_affine() const { return nullptr; }
  virtual nlohmann::json to_json() const = 0;
};

using MappingPtr = std::shared_ptr<const Mapping>;

class AffineMapping final : public Mapping {
 public:
  AffineMapping(Matrix matrix, Vector offset);

  Index dim() const override { return offset_.size(); }
  Vector value(const Vector& x) const override;
  Vector block_value(Index offset, Index size, const Vector& x) const override;
  Vector jacobian_transpose_apply(const Vector& x, const Vector& v) const override;
  const AffineMapping* as_affine() const override { return this; }
  nlohmann::json to_json() const override;

  const Matrix& matrix() const { return matrix_; }
  const Vector& offset() const { return offset_; }

 private:
  Matrix matrix_;
  Vector offset_;
};

// s(x) = offset + amplitude · sin(⟨direction, x⟩)
struct SineScaling {
  double offset = 1.5;
  double amplitude = 1.0;
  Vector direction;

  static SineScaling standard(Index n);
  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  double min_value() const { return offset - std::abs(amplitude); }
  double max_value() const { return offset + std::abs(amplitude); }
};

class ScaledMapping final : public Mapping {
 public:
  ScaledMapping(MappingPtr base, SineScaling scaling);

  Index dim() const override { return base_->dim(); }
  Vector value(const Vector& x) const override;
  Vector block_value(Index offset, Index size, const Vector& x) const override;
  Vector jacobian_transpose_apply(const Vector& x, const Vector& v) const override;
  nlohmann::json to_json() const override;

  const Mapping& base() const { return *base_; }
  const MappingPtr& base_ptr() const { return base_; }
  const SineScaling& scaling() const { return scaling_; }

 private:
  MappingPtr base_;
  SineScaling scaling_;
};

MappingPtr mapping_from_json(const nlohmann::json& j);

}  // namespace scvi
