#include "scvi/gap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "scvi/error.hpp"

namespace scvi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Fs>
struct Overload : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overload(Fs...) -> Overload<Fs...>;

double phi(const Mapping& f, const Vector& x, const Vector& y) { return f.value(y).dot(x - y); }

Vector project_all(const ScviProblem& problem, const Vector& v) {
  Vector out(v.size());
  const auto& layout = problem.layout();
  for (std::size_t i = 0; i < problem.num_blocks(); ++i)
    out.segment(layout.offset(i), layout.size(i)) =
        project(problem.geometry(i).set(), v.segment(layout.offset(i), layout.size(i)));
  return out;
}

Vector linear_max_all(const ScviProblem& problem, const Vector& g) {
  Vector out(g.size());
  const auto& layout = problem.layout();
  for (std::size_t i = 0; i < problem.num_blocks(); ++i)
    out.segment(layout.offset(i), layout.size(i)) = problem.geometry(i).set().linear_maximizer(
        g.segment(layout.offset(i), layout.size(i)));
  return out;
}

bool all_boxes(const ScviProblem& problem) {
  for (const auto& g : problem.geometries())
    if (!g.set().is_box()) return false;
  return true;
}

struct BoxBounds {
  Vector lower, upper;
};

BoxBounds box_bounds(const ScviProblem& problem) {
  BoxBounds b{Vector(problem.dim()), Vector(problem.dim())};
  const auto& layout = problem.layout();
  for (std::size_t i = 0; i < problem.num_blocks(); ++i) {
    const auto& box = std::get<Box>(problem.geometry(i).set().kind());
    b.lower.segment(layout.offset(i), layout.size(i)) = box.lower;
    b.upper.segment(layout.offset(i), layout.size(i)) = box.upper;
  }
  return b;
}

GapEstimate affine_exact(const ScviProblem& problem, const BlockVector& xb, const AffineExact& opt) {
  const AffineMapping* aff = problem.map().as_affine();
  if (!aff) throw DomainError("AffineExact gap needs an affine map");
  const Matrix& a = aff->matrix();
  const Vector& b = aff->offset();
  const Vector& x = xb.values();
  const Matrix h = a + a.transpose();  // φ has Hessian −h
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * h, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double lg = std::max(0.0, es.eigenvalues().maxCoeff());
  if (lo < -1e-10 * std::max(1.0, lg)) throw DomainError("AffineExact needs a monotone affine map");
  const Vector lin = a.transpose() * x - b;  // ∇φ(y) = lin − h y
  auto value = [&](const Vector& y) { return (a * y + b).dot(x - y); };
  auto grad = [&](const Vector& y) -> Vector { return lin - h * y; };

  const bool boxes = all_boxes(problem);
  BoxBounds bounds;
  if (boxes) bounds = box_bounds(problem);

  GapEstimate est;
  est.upper_bound = kInf;
  Vector best = x;
  double best_val = 0.0;
  Vector y = x, prev = x, mom = x;
  double y_val = 0.0;
  double t_mom = 1.0;
  const double step = lg > 0.0 ? 1.0 / lg : 0.0;

  auto consider = [&](const Vector& cand, double v) {
    if (v > best_val) {
      best_val = v;
      best = cand;
    }
  };
  auto certify = [&](const Vector& cand, double v) {
    const Vector g = grad(cand);
    const Vector z = linear_max_all(problem, g);
    const double fw = std::max(0.0, g.dot(z - cand));
    est.upper_bound = std::min(est.upper_bound, v + fw);
    consider(z, value(z));
    ++est.evaluations;
  };
  // Solve the stationarity system on the free coordinates of a box face.
  auto polish = [&](const Vector& cand) {
    const Vector g = grad(cand);
    std::vector<Index> free;
    for (Index j = 0; j < cand.size(); ++j) {
      const bool at_lo = cand[j] <= bounds.lower[j] + 1e-12 && g[j] <= 0.0;
      const bool at_hi = cand[j] >= bounds.upper[j] - 1e-12 && g[j] >= 0.0;
      if (!at_lo && !at_hi) free.push_back(j);
    }
    if (free.empty()) return;
    const Index m = static_cast<Index>(free.size());
    Matrix hff(m, m);
    Vector gf(m);
    for (Index r = 0; r < m; ++r) {
      gf[r] = g[free[r]];
      for (Index c = 0; c < m; ++c) hff(r, c) = h(free[r], free[c]);
    }
    const Vector delta = hff.completeOrthogonalDecomposition().solve(gf);
    Vector trial = cand;
    for (Index r = 0; r < m; ++r) trial[free[r]] += delta[r];
    trial = trial.cwiseMax(bounds.lower).cwiseMin(bounds.upper);
    const double v = value(trial);
    consider(trial, v);
    certify(trial, v);
  };

  certify(y, y_val);
  for (std::size_t it = 0; it < opt.max_iterations; ++it) {
    if (est.upper_bound - best_val <= opt.tolerance) break;
    if (step == 0.0) {
      // Linear objective: the Frank–Wolfe vertex is a maximizer.
      y = linear_max_all(problem, grad(y));
      y_val = value(y);
      consider(y, y_val);
      certify(y, y_val);
      break;
    }
    Vector next = project_all(problem, mom + step * grad(mom));
    double next_val = value(next);
    if (next_val < y_val) {
      // Restart momentum from the last accepted point.
      t_mom = 1.0;
      mom = y;
      next = project_all(problem, y + step * grad(y));
      next_val = value(next);
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
    prev = y;
    y = next;
    y_val = next_val;
    mom = y + ((t_mom - 1.0) / t_next) * (y - prev);
    t_mom = t_next;
    consider(y, y_val);
    if (it % 10 == 9) {
      certify(y, y_val);
      if (boxes) polish(y);
    }
  }
  est.value = std::max(best_val, 0.0);
  est.maximizer = problem.make_vector(best);
  return est;
}

GapEstimate multi_start(const ScviProblem& problem, const BlockVector& xb, const MultiStartAscent& opt) {
  const Mapping& f = problem.map();
  const Vector& x = xb.values();
  RandomStream rng(opt.seed, Substream::Sampling, 3);
  std::vector<Vector> starts{x, problem.center().values()};
  while (starts.size() < std::max<std::size_t>(opt.starts, 2))
    starts.push_back(problem.sample_point(rng).values());
  GapEstimate est;
  est.upper_bound = kInf;
  Vector best = x;
  double best_val = 0.0;
  for (const Vector& s : starts) {
    Vector y = s;
    double v = phi(f, x, y);
    double t = 1.0;
    for (std::size_t it = 0; it < opt.max_iterations; ++it) {
      const Vector g = f.jacobian_transpose_apply(y, x - y) - f.value(y);
      ++est.evaluations;
      Vector trial;
      double tv = -kInf;
      bool accepted = false;
      for (int bt = 0; bt < 60; ++bt) {
        trial = project_all(problem, y + t * g);
        tv = phi(f, x, trial);
        const Vector d = trial - y;
        if (tv >= v + g.dot(d) - d.squaredNorm() / (2.0 * t)) {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) break;
      const double moved = (trial - y).norm();
      y = trial;
      v = std::max(v, tv);
      t *= 2.0;
      if (moved <= opt.tolerance) break;
    }
    if (v > best_val) {
      best_val = v;
      best = y;
    }
  }
  est.value = best_val;
  est.maximizer = problem.make_vector(best);
  return est;
}

std::vector<Vector> block_grid(const ComponentSet& set, double res) {
  const Index n = set.dim();
  Vector lo(n), hi(n);
  std::visit(Overload{[&](const Box& b) {
                        lo = b.lower;
                        hi = b.upper;
                      },
                      [&](const Ball& b) {
                        lo = b.center.array() - b.radius;
                        hi = b.center.array() + b.radius;
                      },
                      [&](const Simplex&) {
                        lo = Vector::Zero(n);
                        hi = Vector::Ones(n);
                      }},
             set.kind());
  const bool simplex = set.is_simplex();
  const Index free = simplex ? n - 1 : n;
  std::vector<Index> counts(free);
  double total = 1.0;
  for (Index j = 0; j < free; ++j) {
    counts[j] = static_cast<Index>(std::ceil((hi[j] - lo[j]) / res)) + 1;
    total *= static_cast<double>(counts[j]);
  }
  if (total > 5e7) throw DomainError("grid too large for brute force gap");
  std::vector<Vector> out;
  std::vector<Index> idx(free, 0);
  Vector p(n);
  while (true) {
    for (Index j = 0; j < free; ++j)
      p[j] = std::min(hi[j], lo[j] + res * static_cast<double>(idx[j]));
    if (simplex) p[n - 1] = 1.0 - p.head(n - 1).sum();
    if (set.contains(p, 1e-12)) out.push_back(p);
    Index j = 0;
    while (j < free && ++idx[j] == counts[j]) idx[j++] = 0;
    if (j == free) break;
  }
  return out;
}

GapEstimate grid_search(const ScviProblem& problem, const BlockVector& xb, const GridBruteForce& opt) {
  if (!(opt.resolution > 0.0)) throw DomainError("grid resolution must be positive");
  const std::size_t d = problem.num_blocks();
  std::vector<std::vector<Vector>> grids;
  double total = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    grids.push_back(block_grid(problem.geometry(i).set(), opt.resolution));
    total *= static_cast<double>(grids.back().size());
  }
  if (total > 5e7) throw DomainError("grid too large for brute force gap");
  const Mapping& f = problem.map();
  const Vector& x = xb.values();
  const auto& layout = problem.layout();
  GapEstimate est;
  est.upper_bound = kInf;
  Vector best = x;
  double best_val = 0.0;
  std::vector<std::size_t> idx(d, 0);
  Vector y(problem.dim());
  while (true) {
    for (std::size_t i = 0; i < d; ++i) y.segment(layout.offset(i), layout.size(i)) = grids[i][idx[i]];
    const double v = phi(f, x, y);
    ++est.evaluations;
    if (v > best_val) {
      best_val = v;
      best = y;
    }
    std::size_t i = 0;
    while (i < d && ++idx[i] == grids[i].size()) idx[i++] = 0;
    if (i == d) break;
  }
  est.value = best_val;
  est.maximizer = problem.make_vector(best);
  return est;
}

}  // namespace

GapEstimate estimate_gap(const ScviProblem& problem, const BlockVector& x, const GapMethod& method) {
  if (x.size() != problem.dim()) throw DimensionError("point dimension mismatch");
  return std::visit(
      Overload{[&](const GridBruteForce& m) { return grid_search(problem, x, m); },
               [&](const MultiStartAscent& m) { return multi_start(problem, x, m); },
               [&](const AffineExact& m) { return affine_exact(problem, x, m); }},
      method);
}

double gap_function(const ScviProblem& problem, const BlockVector& x, const GapMethod& method) {
  return estimate_gap(problem, x, method).value;
}

GapMethod default_gap_method(const ScviProblem& problem) {
  if (problem.map().as_affine()) return AffineExact{};
  return MultiStartAscent{};
}

}  // namespace scvi
