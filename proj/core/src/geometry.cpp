#include "scvi/geometry.hpp"

#include <cmath>

#include "scvi/error.hpp"

namespace scvi {

namespace {

void check_dim(const BlockGeometry& geom, const Vector& v, const char* what) {
  if (v.size() != geom.dim())
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(geom.dim()) +
                         ", got " + std::to_string(v.size()));
}

double xlogx(double z) { return z > 0.0 ? z * std::log(z) : 0.0; }

}  // namespace

BlockGeometry BlockGeometry::euclidean(ComponentSet set) {
  return BlockGeometry(std::move(set), Dgf::Euclidean, NormKind::L2, 1.0, 1.0, 0.0);
}

BlockGeometry BlockGeometry::entropy(Index dim, double floor) {
  if (!(floor > 0.0) || floor * static_cast<double>(dim) >= 1.0)
    throw DomainError("entropy floor must lie in (0, 1/n)");
  return BlockGeometry(ComponentSet::simplex(dim), Dgf::NegativeEntropy, NormKind::L1, 1.0,
                       1.0 / floor, floor);
}

double BlockGeometry::norm(const Vector& v) const {
  check_dim(*this, v, "norm");
  return norm_ == NormKind::L2 ? v.norm() : v.lpNorm<1>();
}

double BlockGeometry::dual_norm(const Vector& v) const {
  check_dim(*this, v, "dual_norm");
  if (v.size() == 0) return 0.0;
  return norm_ == NormKind::L2 ? v.norm() : v.lpNorm<Eigen::Infinity>();
}

Vector BlockGeometry::to_interior(const Vector& x) const {
  check_dim(*this, x, "point");
  if (dgf_ == Dgf::Euclidean) return x;
  if (!set_.contains(x, 1e-9)) throw DomainError("point is not in the simplex");
  Vector z = x.cwiseMax(floor_).cwiseMin(1.0);
  return z / z.sum();
}

double BlockGeometry::omega(const Vector& x) const {
  check_dim(*this, x, "omega");
  if (dgf_ == Dgf::Euclidean) return 0.5 * x.squaredNorm();
  double s = 0.0;
  for (Index j = 0; j < x.size(); ++j) s += xlogx(x[j]);
  return s;
}

Vector BlockGeometry::grad_omega(const Vector& x) const {
  if (dgf_ == Dgf::Euclidean) {
    check_dim(*this, x, "grad_omega");
    return x;
  }
  Vector z = to_interior(x);
  return (z.array().log() + 1.0).matrix();
}

double bregman_distance(const BlockGeometry& geom, const Vector& x, const Vector& y) {
  check_dim(geom, x, "bregman_distance x");
  check_dim(geom, y, "bregman_distance y");
  if (geom.dgf() == Dgf::Euclidean) return 0.5 * (x - y).squaredNorm();
  const Vector xi = geom.to_interior(x);
  if (!geom.set().contains(y, 1e-9)) throw DomainError("bregman_distance: y is not in the simplex");
  double d = 0.0;
  for (Index j = 0; j < y.size(); ++j) {
    const double yj = std::max(y[j], 0.0);
    d += xlogx(yj) - yj * std::log(xi[j]) - yj + xi[j];
  }
  return std::max(d, 0.0);
}

Vector prox_map(const BlockGeometry& geom, const Vector& x, const Vector& y) {
  check_dim(geom, x, "prox_map x");
  check_dim(geom, y, "prox_map y");
  if (!x.allFinite() || !y.allFinite()) throw NonFiniteError("non-finite input to prox_map");
  if (geom.dgf() == Dgf::Euclidean) return project(geom.set(), x - y);
  const Vector xi = geom.to_interior(x);
  Vector l = xi.array().log().matrix() - y;
  l.array() -= l.maxCoeff();
  Vector z = l.array().exp().matrix();
  z /= z.sum();
  z = z.cwiseMax(geom.interior_floor()).cwiseMin(1.0);
  return z / z.sum();
}

double dual_norm(const BlockGeometry& geom, const Vector& v) { return geom.dual_norm(v); }

double composite_norm_squared(std::span<const BlockGeometry> geoms, const BlockVector& x) {
  if (geoms.size() != x.num_blocks()) throw DimensionError("geometry count mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < geoms.size(); ++i) {
    const double ni = geoms[i].norm(x.block(i));
    s += ni * ni;
  }
  return s;
}

}  // namespace scvi
