#pragma once

#include <variant>

#include "scvi/block_vector.hpp"
#include "scvi/random.hpp"

namespace scvi {

enum class NormKind { L2, L1 };

struct Box {
  Vector lower;
  Vector upper;
};

struct Ball {
  Vector center;
  double radius = 1.0;
};

struct Simplex {
  Index dim = 1;
};

class ComponentSet {
 public:
  using Kind = std::variant<Box, Ball, Simplex>;

  static ComponentSet box(Vector lower, Vector upper);
  static ComponentSet unit_box(Index n);
  static ComponentSet ball(Vector center, double radius);
  static ComponentSet simplex(Index dim);

  const Kind& kind() const { return kind_; }
  bool is_box() const { return std::holds_alternative<Box>(kind_); }
  bool is_ball() const { return std::holds_alternative<Ball>(kind_); }
  bool is_simplex() const { return std::holds_alternative<Simplex>(kind_); }
  Index dim() const;

  bool contains(const Vector& x, double tol = 1e-10) const;
  // B with ‖x‖ ≤ B for every member, in the given norm.
  double bound(NormKind norm) const;
  // Box midpoint, ball center, simplex barycenter.
  Vector center() const;
  // sup over members of ‖x − center()‖ in the given norm.
  double radius(NormKind norm) const;
  Vector sample(RandomStream& rng) const;
  // A maximizer of ⟨direction, z⟩ over the set.
  Vector linear_maximizer(const Vector& direction) const;

 private:
  explicit ComponentSet(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

Vector project(const ComponentSet& set, const Vector& p);
Vector project_simplex(const Vector& p);

}  // namespace scvi
