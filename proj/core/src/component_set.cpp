#include "scvi/component_set.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scvi/error.hpp"

namespace scvi {

namespace {

template <class... Fs>
struct Overload : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overload(Fs...) -> Overload<Fs...>;

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw NonFiniteError(std::string("non-finite input to ") + what);
}

}  // namespace

ComponentSet ComponentSet::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size() || lower.size() < 1)
    throw DimensionError("box bounds must have equal positive length");
  if (!lower.allFinite() || !upper.allFinite()) throw DomainError("box bounds must be finite");
  if ((lower.array() > upper.array()).any()) throw DomainError("box needs lower <= upper");
  return ComponentSet(Box{std::move(lower), std::move(upper)});
}

ComponentSet ComponentSet::unit_box(Index n) {
  return box(Vector::Zero(n), Vector::Ones(n));
}

ComponentSet ComponentSet::ball(Vector center, double radius) {
  if (center.size() < 1) throw DimensionError("ball center must be nonempty");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("ball radius must be positive");
  if (!center.allFinite()) throw DomainError("ball center must be finite");
  return ComponentSet(Ball{std::move(center), radius});
}

ComponentSet ComponentSet::simplex(Index dim) {
  if (dim < 1) throw DomainError("simplex dimension must be at least 1");
  return ComponentSet(Simplex{dim});
}

Index ComponentSet::dim() const {
  return std::visit(Overload{[](const Box& b) { return b.lower.size(); },
                             [](const Ball& b) { return b.center.size(); },
                             [](const Simplex& s) { return s.dim; }},
                    kind_);
}

bool ComponentSet::contains(const Vector& x, double tol) const {
  if (x.size() != dim() || !x.allFinite()) return false;
  return std::visit(
      Overload{[&](const Box& b) {
                 return ((x.array() >= b.lower.array() - tol) &&
                         (x.array() <= b.upper.array() + tol))
                     .all();
               },
               [&](const Ball& b) { return (x - b.center).norm() <= b.radius + tol; },
               [&](const Simplex&) {
                 return (x.array() >= -tol).all() && std::abs(x.sum() - 1.0) <= tol;
               }},
      kind_);
}

double ComponentSet::bound(NormKind norm) const {
  return std::visit(
      Overload{[&](const Box& b) {
                 Vector m = b.lower.cwiseAbs().cwiseMax(b.upper.cwiseAbs());
                 return norm == NormKind::L2 ? m.norm() : m.sum();
               },
               [&](const Ball& b) {
                 if (norm == NormKind::L2) return b.center.norm() + b.radius;
                 return b.center.lpNorm<1>() +
                        b.radius * std::sqrt(static_cast<double>(b.center.size()));
               },
               [&](const Simplex&) { return 1.0; }},
      kind_);
}

Vector ComponentSet::center() const {
  return std::visit(
      Overload{[](const Box& b) -> Vector { return 0.5 * (b.lower + b.upper); },
               [](const Ball& b) -> Vector { return b.center; },
               [](const Simplex& s) -> Vector {
                 return Vector::Constant(s.dim, 1.0 / static_cast<double>(s.dim));
               }},
      kind_);
}

double ComponentSet::radius(NormKind norm) const {
  return std::visit(
      Overload{[&](const Box& b) {
                 Vector h = 0.5 * (b.upper - b.lower);
                 return norm == NormKind::L2 ? h.norm() : h.sum();
               },
               [&](const Ball& b) {
                 return norm == NormKind::L2
                            ? b.radius
                            : b.radius * std::sqrt(static_cast<double>(b.center.size()));
               },
               [&](const Simplex& s) {
                 const double n = static_cast<double>(s.dim);
                 return norm == NormKind::L2 ? std::sqrt(1.0 - 1.0 / n) : 2.0 * (1.0 - 1.0 / n);
               }},
      kind_);
}

Vector ComponentSet::sample(RandomStream& rng) const {
  return std::visit(
      Overload{[&](const Box& b) -> Vector {
                 Vector x(b.lower.size());
                 for (Index j = 0; j < x.size(); ++j) x[j] = rng.uniform(b.lower[j], b.upper[j]);
                 return x;
               },
               [&](const Ball& b) -> Vector {
                 const Index n = b.center.size();
                 Vector d(n);
                 for (Index j = 0; j < n; ++j) d[j] = rng.normal();
                 double nd = d.norm();
                 while (nd == 0.0) {
                   for (Index j = 0; j < n; ++j) d[j] = rng.normal();
                   nd = d.norm();
                 }
                 const double t = std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
                 return b.center + (b.radius * t / nd) * d;
               },
               [&](const Simplex& s) -> Vector {
                 Vector e(s.dim);
                 for (Index j = 0; j < s.dim; ++j) e[j] = -std::log1p(-rng.uniform());
                 return e / e.sum();
               }},
      kind_);
}

Vector ComponentSet::linear_maximizer(const Vector& direction) const {
  if (direction.size() != dim()) throw DimensionError("direction length mismatch");
  return std::visit(
      Overload{[&](const Box& b) -> Vector {
                 return (direction.array() >= 0.0).select(b.upper, b.lower);
               },
               [&](const Ball& b) -> Vector {
                 const double n = direction.norm();
                 if (n == 0.0) return b.center;
                 return b.center + (b.radius / n) * direction;
               },
               [&](const Simplex& s) -> Vector {
                 Index j = 0;
                 direction.maxCoeff(&j);
                 Vector e = Vector::Zero(s.dim);
                 e[j] = 1.0;
                 return e;
               }},
      kind_);
}

Vector project_simplex(const Vector& p) {
  const Index n = p.size();
  std::vector<double> u(p.data(), p.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (Index j = 0; j < n; ++j) {
    cumsum += u[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) tau = t;
  }
  return (p.array() - tau).cwiseMax(0.0).matrix();
}

Vector project(const ComponentSet& set, const Vector& p) {
  if (p.size() != set.dim()) throw DimensionError("projection input length mismatch");
  require_finite(p, "project");
  return std::visit(
      Overload{[&](const Box& b) -> Vector { return p.cwiseMax(b.lower).cwiseMin(b.upper); },
               [&](const Ball& b) -> Vector {
                 Vector d = p - b.center;
                 const double n = d.norm();
                 if (n <= b.radius) return p;
                 return b.center + (b.radius / n) * d;
               },
               [&](const Simplex&) -> Vector {
                 if ((p.array() >= 0.0).all() && p.sum() == 1.0) return p;
                 return project_simplex(p);
               }},
      set.kind());
}

}  // namespace scvi
