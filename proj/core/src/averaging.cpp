#include "scvi/averaging.hpp"

#include <cmath>

#include "scvi/error.hpp"

namespace scvi {

std::pair<double, Vector> weighted_average_update(double weight_sum, const Vector& average,
                                                  const Vector& next, double gamma_next, double r) {
  if (next.size() != average.size()) throw DimensionError("average and iterate lengths differ");
  const double w = std::pow(gamma_next, r);
  const double s = weight_sum + w;
  return {s, (weight_sum * average + w * next) / s};
}

void WeightedAverager::add(const Vector& x, double weight) {
  if (average_.size() == 0) average_ = Vector::Zero(x.size());
  if (x.size() != average_.size()) throw DimensionError("average and iterate lengths differ");
  const double s = weight_sum_ + weight;
  average_ = (weight_sum_ * average_ + weight * x) / s;
  weight_sum_ = s;
}

}  // namespace scvi
