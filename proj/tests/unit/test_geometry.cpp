#include <cmath>

#include <gtest/gtest.h>

#include "scvi/error.hpp"
#include "scvi/geometry.hpp"
#include "scvi/random.hpp"

using namespace scvi;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index t = 0;
  for (double x : v) out[t++] = x;
  return out;
}

// Simplex projection by bisection on the threshold τ with Σ max(p − τ, 0) = 1.
Vector simplex_projection_oracle(const Vector& p) {
  double lo = p.minCoeff() - 1.0, hi = p.maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((p.array() - mid).max(0.0).sum() > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return (p.array() - 0.5 * (lo + hi)).max(0.0).matrix();
}

// argmin_z ⟨y,z⟩ + KL(z‖x) over the simplex, by gradient descent on softmax logits.
Vector entropy_prox_oracle(const Vector& x, const Vector& y) {
  const Index n = x.size();
  Vector theta = Vector::Zero(n);
  auto softmax = [](const Vector& t) {
    Vector e = (t.array() - t.maxCoeff()).exp();
    return Vector(e / e.sum());
  };
  for (int it = 0; it < 20000; ++it) {
    const Vector z = softmax(theta);
    const Vector g = y.array() + (z.array() / x.array()).log();  // ∂/∂z
    const double mean = z.dot(g);
    theta -= 0.5 * (z.array() * (g.array() - mean)).matrix();
  }
  return softmax(theta);
}

}  // namespace

TEST(ComponentSet, ProjectionExamples) {
  const auto box = ComponentSet::box(vec({0, 0}), vec({1, 1}));
  EXPECT_TRUE(project(box, vec({2, 0.5})).isApprox(vec({1, 0.5})));
  EXPECT_TRUE(project(ComponentSet::simplex(2), vec({2, 0})).isApprox(vec({1, 0})));
  EXPECT_TRUE(project(ComponentSet::ball(vec({0, 0}), 1.0), vec({3, 4})).isApprox(vec({0.6, 0.8})));
}

TEST(ComponentSet, SimplexProjectionMatchesBisectionOracle) {
  RandomStream rng(11);
  for (int t = 0; t < 200; ++t) {
    Vector p(6);
    for (Index j = 0; j < 6; ++j) p[j] = 3.0 * rng.normal();
    EXPECT_LE((project_simplex(p) - simplex_projection_oracle(p)).lpNorm<Eigen::Infinity>(), 1e-10);
  }
}

TEST(ComponentSet, ProjectionSatisfiesVariationalInequality) {
  RandomStream rng(12);
  const ComponentSet sets[] = {ComponentSet::box(vec({-1, 0, 2}), vec({1, 0.5, 3})),
                               ComponentSet::ball(vec({1, -1, 0}), 2.0), ComponentSet::simplex(3)};
  for (const auto& set : sets) {
    for (int t = 0; t < 100; ++t) {
      const Vector p = 4.0 * Vector::NullaryExpr(3, [&] { return rng.normal(); });
      const Vector z = project(set, p);
      ASSERT_TRUE(set.contains(z, 1e-12));
      for (int s = 0; s < 20; ++s) EXPECT_GE((z - p).dot(set.sample(rng) - z), -1e-10);
    }
  }
}

TEST(ComponentSet, BoundsAndLinearMaximizer) {
  const auto box = ComponentSet::box(vec({-1, -2}), vec({3, 1}));
  EXPECT_NEAR(box.bound(NormKind::L2), std::sqrt(9.0 + 4.0), 1e-12);
  EXPECT_TRUE(box.linear_maximizer(vec({1, -1})).isApprox(vec({3, -2})));
  EXPECT_DOUBLE_EQ(ComponentSet::simplex(4).bound(NormKind::L1), 1.0);
  RandomStream rng(3);
  for (int t = 0; t < 100; ++t) EXPECT_TRUE(ComponentSet::simplex(4).contains(ComponentSet::simplex(4).sample(rng)));
}

TEST(Geometry, BregmanExamples) {
  const auto e = BlockGeometry::euclidean(ComponentSet::unit_box(2));
  EXPECT_DOUBLE_EQ(bregman_distance(e, vec({0.3, -0.2}), vec({0.3, -0.2})), 0.0);
  EXPECT_NEAR(bregman_distance(e, vec({1, 0}), vec({0, 1})), 1.0, 1e-15);
  const auto h = BlockGeometry::entropy(2);
  EXPECT_NEAR(bregman_distance(h, vec({0.5, 0.5}), vec({0.25, 0.75})),
              0.25 * std::log(0.5) + 0.75 * std::log(1.5), 1e-12);
}

TEST(Geometry, ProxExamples) {
  const auto box = BlockGeometry::euclidean(ComponentSet::box(vec({-1}), vec({1})));
  EXPECT_DOUBLE_EQ(prox_map(box, vec({0.5}), vec({2}))[0], -1.0);
  const auto h = BlockGeometry::entropy(2);
  EXPECT_TRUE(prox_map(h, vec({0.5, 0.5}), vec({std::log(2.0), 0})).isApprox(vec({1.0 / 3, 2.0 / 3}), 1e-12));
  RandomStream rng(5);
  for (const auto& g : {box, h}) {
    const Vector x = g.set().sample(rng);
    EXPECT_LE((prox_map(g, x, Vector::Zero(x.size())) - x).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(Geometry, EntropyProxMatchesNumericMinimizer) {
  RandomStream rng(8);
  const auto h = BlockGeometry::entropy(4);
  for (int t = 0; t < 20; ++t) {
    Vector x = h.set().sample(rng);
    x = 0.9 * x + Vector::Constant(4, 0.025);
    const Vector y = Vector::NullaryExpr(4, [&] { return rng.normal(); });
    EXPECT_LE((prox_map(h, x, y) - entropy_prox_oracle(x, y)).lpNorm<Eigen::Infinity>(), 1e-8);
  }
}

TEST(Geometry, DualNormExamples) {
  const auto e = BlockGeometry::euclidean(ComponentSet::unit_box(2));
  const auto h = BlockGeometry::entropy(2);
  EXPECT_DOUBLE_EQ(e.dual_norm(vec({3, 4})), 5.0);
  EXPECT_DOUBLE_EQ(h.dual_norm(vec({3, -4})), 4.0);
  EXPECT_DOUBLE_EQ(h.norm(vec({3, -4})), 7.0);
  EXPECT_DOUBLE_EQ(e.dual_norm(vec({0, 0})), 0.0);
}

TEST(Geometry, EntropyConstantsAndInterior) {
  const auto h = BlockGeometry::entropy(3);
  EXPECT_DOUBLE_EQ(h.mu_omega(), 1.0);
  EXPECT_DOUBLE_EQ(h.l_omega(), 1.0 / kEntropyFloor);
  const Vector xi = h.to_interior(vec({1, 0, 0}));
  EXPECT_GE(xi.minCoeff(), kEntropyFloor * 0.5);
  EXPECT_NEAR(xi.sum(), 1.0, 1e-15);
  EXPECT_THROW(h.to_interior(vec({0.5, 0.5, 0.5})), DomainError);
  EXPECT_THROW(h.to_interior(vec({1.2, -0.2, 0})), DomainError);
}

TEST(Geometry, ThreePointIdentity) {
  RandomStream rng(21);
  const auto e = BlockGeometry::euclidean(ComponentSet::ball(vec({0, 0, 0}), 1.0));
  const auto h = BlockGeometry::entropy(3);
  for (const auto& g : {e, h}) {
    for (int t = 0; t < 100; ++t) {
      const Vector x = g.to_interior(g.set().sample(rng));
      const Vector y = g.to_interior(g.set().sample(rng));
      const Vector z = g.set().sample(rng);
      const double rhs =
          bregman_distance(g, x, y) + bregman_distance(g, y, z) + (g.grad_omega(y) - g.grad_omega(x)).dot(z - y);
      EXPECT_NEAR(bregman_distance(g, x, z), rhs, 1e-10);
    }
  }
}

TEST(Geometry, CompositeNormSquared) {
  auto layout = std::make_shared<const BlockLayout>(std::vector<Index>{2, 3});
  const std::vector<BlockGeometry> geoms{BlockGeometry::euclidean(ComponentSet::unit_box(2)),
                                         BlockGeometry::entropy(3)};
  const BlockVector x(layout, vec({3, 4, 1, -2, 0.5}));
  EXPECT_DOUBLE_EQ(composite_norm_squared(geoms, x), 25.0 + 3.5 * 3.5);
}
