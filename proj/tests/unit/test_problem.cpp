#include <cmath>

#include <gtest/gtest.h>

#include "scvi/certify.hpp"
#include "scvi/error.hpp"
#include "scvi/generators.hpp"
#include "scvi/serialization.hpp"

using namespace scvi;

namespace {

std::vector<BlockGeometry> interval(double lo, double hi) {
  return {BlockGeometry::euclidean(ComponentSet::box(Vector::Constant(1, lo), Vector::Constant(1, hi)))};
}

ScviProblem small_scaled(std::uint64_t seed) {
  StronglyMonotoneAffineParams p;
  p.blocks = 3;
  p.block_size = 2;
  p.lipschitz_bound = 2.0;
  p.seed = seed;
  return make_strictly_pseudo_monotone(make_strongly_monotone_affine(p));
}

}  // namespace

TEST(Generators, OneDimensionalAffine) {
  const auto pr = make_affine_problem(interval(-1, 1), Matrix::Constant(1, 1, 2.0), Vector::Constant(1, 0.3),
                                      NoiseModel::uniform(1, 0.0), {MonotonicityKind::StronglyMonotone, 2.0});
  const auto* aff = pr.map().as_affine();
  ASSERT_NE(aff, nullptr);
  EXPECT_NEAR(aff->offset()[0], -0.6, 1e-15);
  EXPECT_NEAR((*pr.known_solution()).values()[0], 0.3, 1e-15);
}

TEST(Generators, StronglyMonotoneAffineHasDeclaredModulus) {
  StronglyMonotoneAffineParams p;
  p.blocks = 4;
  p.block_size = 3;
  p.modulus = 0.4;
  p.lipschitz_bound = 1.5;
  const auto pr = make_strongly_monotone_affine(p);
  const Matrix& a = pr.map().as_affine()->matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
  EXPECT_GE(es.eigenvalues().minCoeff(), 0.4 - 1e-10);
  EXPECT_LE(a.operatorNorm(), 1.5 + 1e-9);
  RandomStream rng(8);
  for (int t = 0; t < 1000; ++t) {
    const Vector x = pr.sample_point(rng).values(), y = pr.sample_point(rng).values();
    EXPECT_GE((a * (x - y)).dot(x - y), 0.4 * (x - y).squaredNorm() - 1e-12);
  }
  EXPECT_TRUE(pr.contains(*pr.known_solution()));
  EXPECT_LE(pr.expected_map(*pr.known_solution()).values().norm(), 1e-12);
}

TEST(Generators, DeterministicForSeed) {
  MonotoneAffineParams p;
  p.seed = 17;
  const auto a = make_monotone_affine(p);
  const auto b = make_monotone_affine(p);
  EXPECT_EQ(problem_to_json(a).dump(), problem_to_json(b).dump());
  p.seed = 18;
  EXPECT_NE(problem_to_json(make_monotone_affine(p)).dump(), problem_to_json(a).dump());
}

TEST(Generators, IdentityScalingLeavesMapUnchanged) {
  StronglyMonotoneAffineParams p;
  const auto base = make_strongly_monotone_affine(p);
  SineScaling s = SineScaling::standard(base.dim());
  s.offset = 1.0;
  s.amplitude = 0.0;
  const auto scaled = make_strictly_pseudo_monotone(base, s);
  RandomStream rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto x = base.sample_point(rng);
    EXPECT_LE((scaled.expected_map(x).values() - base.expected_map(x).values()).norm(), 1e-15);
  }
}

TEST(Generators, ScopIdentityQuadratic) {
  auto geoms = make_geometries(2, 2, SetKind::SymmetricBox);
  const auto pr = make_quadratic_problem(geoms, Matrix::Identity(4, 4), Vector::Zero(4), NoiseModel::uniform(2, 0.1));
  EXPECT_LE(pr.known_solution()->values().norm(), 1e-9);
  EXPECT_NEAR(pr.objective()->optimal_value, 0.0, 1e-15);
  EXPECT_EQ(pr.monotonicity().kind, MonotonicityKind::ConvexGradient);
}

TEST(Generators, NashZeroCouplingDecouples) {
  NashQuadraticParams p;
  p.players = 3;
  p.strategy_size = 2;
  p.coupling = 0.0;
  p.linear_scale = 3.0;
  const auto pr = make_nash_quadratic(p);
  const Matrix& a = pr.map().as_affine()->matrix();
  const Vector& c = pr.map().as_affine()->offset();
  for (std::size_t i = 0; i < 3; ++i) {
    const Matrix h = a.block(2 * i, 2 * i, 2, 2);
    const Vector ci = c.segment(2 * i, 2);
    Vector x = Vector::Constant(2, 0.5);
    const double step = 1.0 / h.operatorNorm();
    for (int it = 0; it < 100000; ++it) x = (x - step * (h * x + ci)).cwiseMax(0.0).cwiseMin(1.0);
    EXPECT_LE((pr.known_solution()->block(i) - x).norm(), 1e-8);
  }
  p.coupling = 5.0;
  EXPECT_THROW(make_nash_quadratic(p), DomainError);
}

TEST(Generators, RegistryAndParamsRoundTrip) {
  const nlohmann::json params = {{"blocks", 2}, {"block_size", 2}, {"seed", 5}};
  const auto a = generate_problem("monotone_affine", params);
  EXPECT_EQ(a.num_blocks(), 2u);
  const auto s = generate_problem(
      "strictly_pseudo_monotone",
      {{"base", {{"name", "strongly_monotone_affine"}, {"params", params}}}});
  EXPECT_EQ(s.monotonicity().kind, MonotonicityKind::StrictlyPseudoMonotone);
  EXPECT_THROW(generate_problem("no_such_generator", params), Error);
}

TEST(Problem, ZeroNoiseSampleIsExpectedMap) {
  StronglyMonotoneAffineParams p;
  p.noise_std = 0.0;
  const auto pr = make_strongly_monotone_affine(p);
  RandomStream rng(1), noise(2);
  const auto x = pr.sample_point(rng);
  EXPECT_EQ(sample_map(pr, x, noise).values(), pr.expected_map(x).values());
  EXPECT_EQ(sample_block_map(pr, 1, x, noise), pr.expected_block(1, x));
}

TEST(Problem, NoiseMeanMatchesExpectedMap) {
  StronglyMonotoneAffineParams p;
  p.blocks = 2;
  p.block_size = 2;
  p.noise_std = 0.5;
  const auto pr = make_strongly_monotone_affine(p);
  RandomStream rng(1), noise(2);
  const auto x = pr.sample_point(rng);
  const int n = 100000;
  Vector sum = Vector::Zero(pr.dim());
  for (int t = 0; t < n; ++t) sum += sample_map(pr, x, noise).values();
  const Vector diff = sum / n - pr.expected_map(x).values();
  EXPECT_LE(diff.lpNorm<Eigen::Infinity>(), 3.0 * 0.5 / std::sqrt(n) * 1.5);
}

TEST(Problem, NoiseVarianceWithinBound) {
  StronglyMonotoneAffineParams p;
  p.blocks = 2;
  p.block_size = 2;
  p.noise_std = 0.5;
  const auto pr = make_strongly_monotone_affine(p);
  RandomStream rng(1), noise(3);
  const auto x = pr.sample_point(rng);
  const BlockVector mean = pr.expected_map(x);
  const int n = 100000;
  std::vector<double> ss(2, 0.0);
  for (int t = 0; t < n; ++t) {
    const BlockVector s = sample_map(pr, x, noise);
    for (std::size_t i = 0; i < 2; ++i) ss[i] += (s.block(i) - mean.block(i)).squaredNorm();
  }
  for (std::size_t i = 0; i < 2; ++i) EXPECT_LE(ss[i] / n, 1.1 * std::pow(pr.constants().noise[i], 2));
}

TEST(Problem, ScaledJacobianMatchesFiniteDifferences) {
  const auto pr = small_scaled(2);
  RandomStream rng(9);
  const auto x = pr.sample_point(rng).values();
  const Vector v = Vector::NullaryExpr(x.size(), [&] { return rng.normal(); });
  const double h = 1e-6;
  Vector fd(x.size());
  for (Index j = 0; j < x.size(); ++j) {
    Vector e = Vector::Zero(x.size());
    e[j] = h;
    fd[j] = v.dot(pr.map().value(x + e) - pr.map().value(x - e)) / (2 * h);
  }
  EXPECT_LE((pr.map().jacobian_transpose_apply(x, v) - fd).norm(), 1e-7);
}

TEST(Certify, StronglyMonotonePasses) {
  StronglyMonotoneAffineParams p;
  const auto pr = make_strongly_monotone_affine(p);
  const auto cert =
      certify_monotonicity(pr, {MonotonicityKind::StronglyMonotone, *pr.constants().modulus}, 2000, 1);
  EXPECT_TRUE(cert.passed);
  EXPECT_GE(cert.worst_margin, *pr.constants().modulus * (1 - 1e-10));
}

TEST(Certify, ScaledInstanceIsPseudoButNotMonotone) {
  const auto pr = small_scaled(1);
  const auto mono = certify_monotonicity(pr, {MonotonicityKind::Monotone, 0.0}, 2000, 3);
  EXPECT_FALSE(mono.passed);
  ASSERT_TRUE(mono.violating_pair.has_value());
  const auto& [x, y] = *mono.violating_pair;
  EXPECT_LT((pr.expected_map(x).values() - pr.expected_map(y).values()).dot(x.values() - y.values()), 0.0);
  const auto pseudo = certify_monotonicity(pr, {MonotonicityKind::StrictlyPseudoMonotone, 0.0}, 2000, 3);
  EXPECT_TRUE(pseudo.passed);
  EXPECT_GT(pseudo.premise_pairs, 0u);
}

TEST(Certify, AnalyticConstantsDominateSamples) {
  for (const auto& pr : {small_scaled(4), generate_problem("nash_quadratic", {{"seed", 2}}),
                         generate_problem("monotone_affine", {{"set_kind", "entropy_simplex"}, {"seed", 2}})}) {
    const auto cert = certify_constants(pr, 3000, 6);
    EXPECT_TRUE(cert.passed()) << cert.to_json().dump();
  }
}

TEST(Serialization, ProblemRoundTrip) {
  const auto pr = small_scaled(3);
  const auto j = problem_to_json(pr);
  const auto back = problem_from_json(j);
  EXPECT_EQ(problem_to_json(back).dump(), j.dump());
  RandomStream rng(2);
  const auto x = pr.sample_point(rng);
  EXPECT_LE((back.expected_map(x).values() - pr.expected_map(x).values()).norm(), 1e-14);
}

TEST(Problem, OperatorNormVariants) {
  Matrix m(2, 2);
  m << 1, -2, 3, 4;
  EXPECT_NEAR(operator_norm(m, NormKind::L1, NormKind::L1), 4.0, 1e-15);  // max |entry|
  EXPECT_NEAR(operator_norm(m, NormKind::L2, NormKind::L2), m.operatorNorm(), 1e-12);
}
