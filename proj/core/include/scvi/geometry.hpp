#pragma once

#include <span>

#include "scvi/block_vector.hpp"
#include "scvi/component_set.hpp"

namespace scvi {

enum class Dgf { Euclidean, NegativeEntropy };

inline constexpr double kEntropyFloor = 1e-12;

class BlockGeometry {
 public:
  static BlockGeometry euclidean(ComponentSet set);
  static BlockGeometry entropy(Index dim, double floor = kEntropyFloor);

  const ComponentSet& set() const { return set_; }
  Dgf dgf() const { return dgf_; }
  NormKind norm_kind() const { return norm_; }
  double mu_omega() const { return mu_omega_; }
  double l_omega() const { return l_omega_; }
  double interior_floor() const { return floor_; }
  Index dim() const { return set_.dim(); }
  double bound() const { return set_.bound(norm_); }

  double norm(const Vector& v) const;
  double dual_norm(const Vector& v) const;
  double omega(const Vector& x) const;
  Vector grad_omega(const Vector& x) const;
  // Entropy: checks simplex membership, clamps to [floor, 1], renormalizes.
  // Euclidean: checks the dimension only.
  Vector to_interior(const Vector& x) const;

 private:
  BlockGeometry(ComponentSet set, Dgf dgf, NormKind norm, double mu, double l, double floor)
      : set_(std::move(set)), dgf_(dgf), norm_(norm), mu_omega_(mu), l_omega_(l), floor_(floor) {}

  ComponentSet set_;
  Dgf dgf_;
  NormKind norm_;
  double mu_omega_;
  double l_omega_;
  double floor_;
};

double bregman_distance(const BlockGeometry& geom, const Vector& x, const Vector& y);
Vector prox_map(const BlockGeometry& geom, const Vector& x, const Vector& y);
double dual_norm(const BlockGeometry& geom, const Vector& v);

// Σ_i ‖x^i‖_i²
double composite_norm_squared(std::span<const BlockGeometry> geoms, const BlockVector& x);

}  // namespace scvi
