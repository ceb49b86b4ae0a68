#pragma once

#include <utility>

#include "scvi/block_vector.hpp"

namespace scvi {

// (S_k, x̄_k) ↦ (S_k + w, (S_k x̄_k + w x_{k+1}) / (S_k + w)) with w = γ_{k+1}^r.
std::pair<double, Vector> weighted_average_update(double weight_sum, const Vector& average,
                                                  const Vector& next, double gamma_next, double r);

// Running weighted average Σ_t w_t x_t / Σ_t w_t, updated in place.
class WeightedAverager {
 public:
  WeightedAverager() = default;
  explicit WeightedAverager(Index dim) : average_(Vector::Zero(dim)) {}

  void add(const Vector& x, double weight);
  double weight_sum() const { return weight_sum_; }
  const Vector& average() const { return average_; }
  bool empty() const { return weight_sum_ == 0.0; }

 private:
  double weight_sum_ = 0.0;
  Vector average_;
};

}  // namespace scvi
