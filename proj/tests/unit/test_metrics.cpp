#include <cmath>

#include <gtest/gtest.h>

#include "scvi/error.hpp"
#include "scvi/gap.hpp"
#include "scvi/generators.hpp"
#include "scvi/lemma_checks.hpp"
#include "scvi/metrics.hpp"
#include "scvi/solvers.hpp"

using namespace scvi;

namespace {

LayoutPtr layout(std::vector<Index> sizes) { return std::make_shared<const BlockLayout>(sizes); }

ProblemConstants unit_constants(std::size_t d) {
  ProblemConstants c;
  c.bound.assign(d, 1.0);
  c.map_bound.assign(d, 1.0);
  c.lipschitz.assign(d, 1.0);
  c.noise.assign(d, 1.0);
  c.noise_tilde.assign(d, 1.0);
  c.modulus = 1.0;
  return c;
}

// Second, independent evaluation of the displayed rate constants.
struct RateOracle {
  double theta = 0, a = 0, b = 0, m = 0, cc = 0;
};

RateOracle rate_oracle(const ProblemConstants& c, const std::vector<double>& mu_w, const std::vector<double>& l_w,
                       double r, double gamma, double gamma0) {
  RateOracle o;
  double lb2 = 0, max_l = 0, min_mu = 1e300;
  for (std::size_t i = 0; i < c.bound.size(); ++i) {
    const double C = c.map_bound[i], nu = c.noise[i], nut = c.noise_tilde[i], B = c.bound[i], L = c.lipschitz[i];
    o.theta += (C * C + nu * nu) / mu_w[i] + 2 * L * B * (C + nut);
    o.cc += (2 / mu_w[i]) * (2 * C * C + nut * nut + 1.25 * nu * nu);
    lb2 += l_w[i] * B * B;
    max_l = std::max(max_l, l_w[i]);
    min_mu = std::min(min_mu, mu_w[i]);
  }
  const double mu = *c.modulus;
  o.a = 4 * o.theta * max_l * max_l / (mu * mu * min_mu);
  const double lead = (2 - r) * std::pow(2.0, 1 - 0.5 * r);
  o.b = lead * (2 * lb2 / gamma + gamma * o.theta / (1 - r));
  o.m = lead * (4 * lb2 / gamma0 + gamma0 * o.cc / (1 - r));
  return o;
}

ScviProblem line_problem(double slope, double target) {
  std::vector<BlockGeometry> g{
      BlockGeometry::euclidean(ComponentSet::box(Vector::Constant(1, -1), Vector::Constant(1, 1)))};
  return make_affine_problem(g, Matrix::Constant(1, 1, slope), Vector::Constant(1, target),
                             NoiseModel::uniform(1, 0.0), {MonotonicityKind::Monotone, 0.0});
}

// sup over a uniform grid of a 2-D box.
double grid_gap_oracle(const ScviProblem& pr, const Vector& x, int per_axis) {
  const auto& a = *pr.map().as_affine();
  double best = 0.0;
  for (int s = 0; s <= per_axis; ++s)
    for (int t = 0; t <= per_axis; ++t) {
      Vector y(2);
      y << static_cast<double>(s) / per_axis, static_cast<double>(t) / per_axis;
      best = std::max(best, (a.matrix() * y + a.offset()).dot(x - y));
    }
  return best;
}

}  // namespace

TEST(Lyapunov, Examples) {
  auto l = layout({1, 1});
  const std::vector<BlockGeometry> geoms(2, BlockGeometry::euclidean(ComponentSet::unit_box(1)));
  const std::vector<double> p{0.5, 0.5};
  const BlockVector x(l, Vector::Constant(2, 0.3));
  EXPECT_DOUBLE_EQ(lyapunov(p, geoms, x, x), 0.0);
  Vector yv(2);
  yv << 1.3, -0.7;  // ‖x − y‖² = 2
  EXPECT_NEAR(lyapunov(p, geoms, x, BlockVector(l, yv)), 2.0, 1e-14);
}

TEST(Lyapunov, LowerBoundAndDefiniteness) {
  auto l = layout({2, 3});
  const std::vector<BlockGeometry> geoms{BlockGeometry::euclidean(ComponentSet::unit_box(2)),
                                         BlockGeometry::entropy(3)};
  const std::vector<double> p{0.3, 0.7};
  RandomStream rng(5);
  for (int t = 0; t < 200; ++t) {
    Vector xv(5), yv(5);
    xv.head(2) = geoms[0].set().sample(rng);
    yv.head(2) = geoms[0].set().sample(rng);
    xv.tail(3) = geoms[1].set().sample(rng);
    yv.tail(3) = geoms[1].set().sample(rng);
    const BlockVector x(l, xv), y(l, yv);
    const double n0 = (xv.head(2) - yv.head(2)).squaredNorm();
    const double n1 = std::pow((xv.tail(3) - yv.tail(3)).lpNorm<1>(), 2);
    EXPECT_GE(lyapunov(p, geoms, x, y), 0.5 * std::min(1 / 0.3, 1 / 0.7) * (n0 + n1) - 1e-12);
    Vector zv = xv;
    zv[0] += (zv[0] < 0.5 ? 1e-6 : -1e-6);
    EXPECT_GT(lyapunov(p, geoms, x, BlockVector(l, zv)), 0.0);
  }
}

TEST(Mse, Examples) {
  auto l = layout({2, 2});
  const BlockVector x(l, Vector::Zero(4));
  EXPECT_DOUBLE_EQ(mse(x, x), 0.0);
  Vector v = Vector::Zero(4);
  v[2] = 1.0;
  EXPECT_DOUBLE_EQ(mse(x, BlockVector(l, v)), 1.0);
  const std::vector<BlockGeometry> geoms{BlockGeometry::euclidean(ComponentSet::unit_box(2)),
                                         BlockGeometry::entropy(2)};
  Vector w(4);
  w << 0.5, -0.5, 0.25, -0.75;
  EXPECT_DOUBLE_EQ(mse(geoms, x, BlockVector(l, w)), 0.5 + 1.0);
}

TEST(RateConstants, UnitExamples) {
  const auto c = unit_constants(1);
  const std::vector<BlockGeometry> geoms{BlockGeometry::euclidean(ComponentSet::unit_box(1))};
  EXPECT_DOUBLE_EQ(theta_constant(c, geoms), 6.0);
  EXPECT_DOUBLE_EQ(gap_noise_constant(c, geoms), 8.5);
  const auto rc = rate_constants(c, geoms, std::vector<double>{1.0}, {});
  EXPECT_DOUBLE_EQ(*rc.mse_rate, 24.0);
}

TEST(RateConstants, MatchIndependentEvaluation) {
  RandomStream rng(31);
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = 1 + rng.index(5);
    std::vector<BlockGeometry> geoms;
    std::vector<double> mu_w, l_w;
    ProblemConstants c;
    for (std::size_t i = 0; i < d; ++i) {
      geoms.push_back(rng.uniform() < 0.5 ? BlockGeometry::euclidean(ComponentSet::unit_box(2))
                                          : BlockGeometry::entropy(3, 1e-3));
      mu_w.push_back(geoms.back().mu_omega());
      l_w.push_back(geoms.back().l_omega());
      c.bound.push_back(rng.uniform(0.1, 3));
      c.map_bound.push_back(rng.uniform(0.1, 3));
      c.lipschitz.push_back(rng.uniform(0.1, 3));
      c.noise.push_back(rng.uniform(0, 2));
      c.noise_tilde.push_back(rng.uniform(0, 2));
    }
    c.modulus = rng.uniform(0.05, 2);
    RateParameters rp;
    rp.averaging_exponent = rng.uniform(-2, 0.9);
    rp.gamma_factor = rng.uniform(0.1, 3);
    rp.gamma0 = rng.uniform(0.1, 3);
    const auto rc = rate_constants(c, geoms, uniform_probabilities(d), rp);
    const auto o = rate_oracle(c, mu_w, l_w, rp.averaging_exponent, rp.gamma_factor, rp.gamma0);
    EXPECT_NEAR(rc.theta, o.theta, 1e-12 * o.theta);
    EXPECT_NEAR(rc.gap_noise, o.cc, 1e-12 * o.cc);
    EXPECT_NEAR(*rc.mse_rate, o.a, 1e-12 * o.a);
    EXPECT_NEAR(rc.averaged_objective_rate, o.b, 1e-12 * o.b);
    EXPECT_NEAR(rc.gap_rate, o.m, 1e-12 * o.m);
  }
  EXPECT_THROW(rate_constants(unit_constants(1), std::vector<BlockGeometry>{BlockGeometry::entropy(2)},
                              std::vector<double>{1.0}, {1.0, 1.0, 1.0}),
               DomainError);
}

TEST(RateConstants, ExplicitBoundsMatchDirectSums) {
  const auto c = unit_constants(2);
  const std::vector<BlockGeometry> geoms(2, BlockGeometry::euclidean(ComponentSet::unit_box(1)));
  const std::vector<double> p{0.25, 0.75};
  const auto s = StepsizeSchedule::inverse_sqrt(1.7);
  const double r = -0.5;
  const std::uint64_t big_k = 37;
  double sr = 0, sr1 = 0, sr_head = 0, sr1_head = 0;
  for (std::uint64_t k = 0; k <= big_k; ++k) {
    const double g = 1.7 / std::sqrt(k + 1.0);
    sr += std::pow(g, r);
    sr1 += std::pow(g, r + 1);
    if (k < big_k) sr_head += std::pow(g, r), sr1_head += std::pow(g, r + 1);
  }
  const double theta = 12.0, lbp = (1 / 0.25 + 1 / 0.75), lb = 2.0, cc = 17.0;
  const double avg = (2 * std::pow(s(big_k), r - 1) * lbp + theta * sr1) / sr;
  EXPECT_NEAR(averaged_objective_bound(c, geoms, p, s, r, big_k), avg, 1e-12 * avg);
  EXPECT_NEAR(averaged_objective_bound(c, geoms, p, s, r, big_k, sr), avg, 1e-12 * avg);
  const double gap = (4 * std::pow(s(big_k - 1), r - 1) * lb + cc * sr1_head) / sr_head;
  EXPECT_NEAR(gap_bound(c, geoms, s, r, big_k), gap, 1e-12 * gap);
  EXPECT_EQ(rate_threshold(0.0), 3u);
  EXPECT_EQ(rate_threshold(0.5), 3u);
  EXPECT_EQ(rate_threshold(-3.0), 3u);
  EXPECT_EQ(rate_threshold(0.9), static_cast<std::uint64_t>(std::ceil(std::pow(1.05, 20.0))));
}

TEST(FitRate, ExactAndNoisySeries) {
  std::vector<std::pair<double, double>> inv, invsqrt, noisy, scaled;
  RandomStream rng(3);
  for (int j = 0; j < 20; ++j) {
    const double k = 100.0 * std::pow(10.0, j / 10.0);
    inv.emplace_back(k, 3.0 / k);
    invsqrt.emplace_back(k, 3.0 / std::sqrt(k));
    noisy.emplace_back(k, 3.0 / k * (1.0 + 0.05 * rng.normal()));
    scaled.emplace_back(k, 7.0 * 3.0 / k);
  }
  EXPECT_NEAR(fit_rate(inv).slope, -1.0, 1e-9);
  EXPECT_NEAR(fit_rate(invsqrt).slope, -0.5, 1e-9);
  const double s = fit_rate(noisy).slope;
  EXPECT_GE(s, -1.15);
  EXPECT_LE(s, -0.85);
  EXPECT_NEAR(fit_rate(scaled).slope, fit_rate(inv).slope, 1e-9);
  EXPECT_NEAR(fit_rate(scaled).intercept - fit_rate(inv).intercept, std::log(7.0), 1e-9);
  inv[3].second = 0.0;
  EXPECT_THROW(fit_rate(inv), DomainError);
  EXPECT_THROW(fit_rate(std::vector<std::pair<double, double>>{{200, 1}, {300, 1}}), DomainError);
}

TEST(RecursionLemma, PaperExample) {
  const auto rep = verify_recursion_lemma(1.0, 1.0, 2.0, 10.0, 100000);
  EXPECT_TRUE(rep.passed());
  EXPECT_TRUE(rep.tight_case);
  EXPECT_LE(rep.max_ratio, 1.0 + 1e-12);
}

TEST(RecursionLemma, ZeroNoiseAndGeneralCase) {
  EXPECT_TRUE(verify_recursion_lemma(1.0, 0.0, 2.0, 5.0, 1000).passed());
  const auto rep = verify_recursion_lemma(1.0, 1.0, 3.0, 4.0, 10000);
  EXPECT_TRUE(rep.general_bound_holds);
  EXPECT_EQ(rep.start, 3u);
  // direct simulation oracle for the general bound
  double e = 4.0, ek_at_k = 0.0;
  std::vector<double> seq{e};
  for (std::uint64_t k = 0; k < 10000; ++k) {
    const double g = k == 0 ? 3.0 : 3.0 / k;
    e = std::max(0.0, (1 - g) * e + g * g);
    seq.push_back(e);
  }
  ek_at_k = seq[3];
  const double bound_const = std::max(9.0 / 2.0, 3.0 * ek_at_k);
  for (std::uint64_t k = 3; k <= 10000; ++k) EXPECT_LE(seq[k], bound_const / k * (1 + 1e-12));
}

TEST(RecursionLemma, RandomTightDraws) {
  RandomStream rng(17);
  for (int t = 0; t < 100; ++t) {
    const double alpha = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
    const double beta = std::exp(rng.uniform(std::log(0.01), std::log(10.0)));
    EXPECT_TRUE(verify_recursion_lemma(alpha, beta, 2.0 / alpha, rng.uniform(0, 20), 10000).passed());
  }
}

TEST(StepsizeSums, Examples) {
  for (auto [g0, r, k] : {std::tuple{1.0, 0.0, 100ull}, std::tuple{2.0, 0.5, 10000ull}}) {
    const auto rep = verify_stepsize_sums(g0, r, k);
    EXPECT_TRUE(rep.passed());
    double s1 = 0, s0 = 0;
    for (std::uint64_t t = 0; t <= k; ++t) {
      const double g = g0 / std::sqrt(t + 1.0);
      s1 += std::pow(g, r + 1);
      if (t < k) s0 += std::pow(g, r);
    }
    EXPECT_NEAR(rep.sum_r_plus_one, s1, 1e-10 * s1);
    EXPECT_NEAR(rep.sum_r, s0, 1e-10 * s0);
  }
  // ((3−r)/2)^{2/(1−r)} < e for all r < 1, so every admissible K ≥ 4 clears the threshold.
  for (double r : {-50.0, -1.0, 0.0, 0.5, 0.9, 0.999}) {
    EXPECT_LE(rate_threshold(r), 3u);
    EXPECT_TRUE(verify_stepsize_sums(1.0, r, 4).threshold_met);
  }
  for (double r : {-1.0, 0.0, 0.5, 0.9, 0.999}) EXPECT_TRUE(verify_stepsize_sums(1.0, r, 4).passed());
  // Σ_{k<4}(k+1)^25 ≈ 1.13e15 is below 5^26/52 ≈ 2.87e16: the lower bound needs moderate |r| at small K.
  const auto steep = verify_stepsize_sums(1.0, -50.0, 4);
  EXPECT_FALSE(steep.lower_holds);
  EXPECT_FALSE(steep.passed());
  EXPECT_THROW(verify_stepsize_sums(1.0, 0.5, 3), DomainError);
}

TEST(Gap, OneDimensionalClosedForm) {
  const auto pr = line_problem(1.0, 0.0);
  const auto x = pr.make_vector(Vector::Constant(1, 1.0));
  EXPECT_NEAR(gap_function(pr, x, AffineExact{}), 0.25, 1e-10);
  EXPECT_NEAR(gap_function(pr, x, GridBruteForce{1e-3}), 0.25, 1e-6);
  EXPECT_NEAR(gap_function(pr, x, MultiStartAscent{}), 0.25, 1e-8);
}

TEST(Gap, ZeroAtSolutionAndNonnegative) {
  MonotoneAffineParams p;
  p.blocks = 2;
  p.block_size = 2;
  const auto pr = make_monotone_affine(p);
  EXPECT_NEAR(gap_function(pr, *pr.known_solution(), AffineExact{}), 0.0, 1e-9);
  RandomStream rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto x = pr.sample_point(rng);
    EXPECT_GE(gap_function(pr, x, AffineExact{}), 0.0);
    EXPECT_GE(gap_function(pr, x, MultiStartAscent{}), 0.0);
  }
}

TEST(Gap, MethodsAgreeWithGridOracle) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    MonotoneAffineParams p;
    p.blocks = 2;
    p.block_size = 1;
    p.psd_scale = 0.5;
    p.seed = seed;
    const auto pr = make_monotone_affine(p);
    RandomStream rng(seed);
    for (int t = 0; t < 3; ++t) {
      const auto x = pr.sample_point(rng);
      const double oracle = grid_gap_oracle(pr, x.values(), 1000);
      EXPECT_NEAR(gap_function(pr, x, MultiStartAscent{}), oracle, 1e-3);
      EXPECT_NEAR(gap_function(pr, x, GridBruteForce{1e-3}), oracle, 1e-3);
      const auto exact = estimate_gap(pr, x, AffineExact{});
      EXPECT_GE(exact.value, oracle - 1e-9);
      EXPECT_LE(exact.value, exact.upper_bound + 1e-12);
      EXPECT_LE(exact.upper_bound - exact.value, 1e-8);
    }
  }
}

TEST(Gap, AffineExactRejectsNonAffine) {
  StronglyMonotoneAffineParams p;
  const auto pr = make_strictly_pseudo_monotone(make_strongly_monotone_affine(p));
  EXPECT_THROW(gap_function(pr, *pr.known_solution(), AffineExact{}), Error);
  EXPECT_TRUE(std::holds_alternative<MultiStartAscent>(default_gap_method(pr)));
}
