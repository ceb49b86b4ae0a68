#include <cmath>

#include <gtest/gtest.h>

#include "scvi/averaging.hpp"
#include "scvi/error.hpp"
#include "scvi/generators.hpp"
#include "scvi/solvers.hpp"

using namespace scvi;

namespace {

ScviProblem line_problem(double noise) {
  std::vector<BlockGeometry> g{
      BlockGeometry::euclidean(ComponentSet::box(Vector::Constant(1, -1), Vector::Constant(1, 1)))};
  return make_affine_problem(g, Matrix::Constant(1, 1, 2.0), Vector::Constant(1, 0.3),
                             NoiseModel::uniform(1, noise), {MonotonicityKind::StronglyMonotone, 2.0});
}

ScviProblem blocks_problem(double noise = 0.1) {
  StronglyMonotoneAffineParams p;
  p.blocks = 4;
  p.block_size = 2;
  p.noise_std = noise;
  return make_strongly_monotone_affine(p);
}

}  // namespace

TEST(BsmpStep, HandComputedExtragradient) {
  const auto pr = line_problem(0.0);
  RandomStream a(1), b(2);
  const auto step = bsmp_step(pr, pr.make_vector(Vector::Constant(1, 1.0)), 0.1, 0, a, b);
  EXPECT_NEAR(step.extrapolated.values()[0], 0.86, 1e-15);
  EXPECT_NEAR(step.next.values()[0], 0.888, 1e-15);
}

TEST(BsmpStep, ZeroStepAndUntouchedBlocks) {
  const auto pr = blocks_problem();
  RandomStream rng(3), a(4), b(5);
  const auto x = pr.sample_point(rng);
  EXPECT_EQ(bsmp_step(pr, x, 0.0, 2, a, b).next.values(), x.values());
  const auto step = bsmp_step(pr, x, 0.5, 1, a, b);
  for (std::size_t j = 0; j < pr.num_blocks(); ++j) {
    if (j == 1) continue;
    for (Index t = 0; t < 2; ++t) EXPECT_EQ(step.next.block(j)[t], x.block(j)[t]);
  }
}

TEST(RunBsmp, ZeroIterationsKeepsStart) {
  const auto pr = blocks_problem();
  BsmpConfig cfg;
  cfg.iterations = 0;
  cfg.seed = 3;
  const auto trace = run_bsmp(pr, cfg);
  ASSERT_EQ(trace.checkpoints.size(), 1u);
  EXPECT_EQ(trace.checkpoints[0].k, 0u);
  RandomStream init(3, Substream::Initial);
  EXPECT_EQ(trace.checkpoints[0].iterate.values(), pr.sample_point(init).values());
}

TEST(RunBsmp, BlockFrequenciesMatchProbabilities) {
  const auto pr = blocks_problem();
  BsmpConfig cfg;
  cfg.iterations = 100000;
  cfg.block_probs = {0.1, 0.2, 0.3, 0.4};
  cfg.seed = 11;
  cfg.checkpoints.geometric = false;
  cfg.checkpoints.linear_count = 0;
  const auto trace = run_bsmp(pr, cfg);
  double chi2 = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double expected = cfg.block_probs[i] * 100000.0;
    chi2 += std::pow(static_cast<double>(trace.block_counts[i]) - expected, 2) / expected;
  }
  EXPECT_LT(chi2, 11.345);  // 99% quantile, 3 degrees of freedom
}

TEST(RunBsmp, DeterministicGivenSeed) {
  const auto pr = blocks_problem();
  BsmpConfig cfg;
  cfg.iterations = 500;
  cfg.seed = 9;
  cfg.averaging_exponent = 0.0;
  cfg.schedule = StepsizeSchedule::inverse_sqrt(1.0);
  const auto a = run_bsmp(pr, cfg);
  const auto b = run_bsmp(pr, cfg);
  ASSERT_EQ(a.checkpoints.size(), b.checkpoints.size());
  for (std::size_t c = 0; c < a.checkpoints.size(); ++c) {
    EXPECT_EQ(a.checkpoints[c].iterate.values(), b.checkpoints[c].iterate.values());
    EXPECT_EQ(a.checkpoints[c].average->values(), b.checkpoints[c].average->values());
  }
  cfg.seed = 10;
  EXPECT_NE(run_bsmp(pr, cfg).checkpoints.back().iterate.values(), a.checkpoints.back().iterate.values());
}

TEST(RunBsmp, IteratesAndAveragesStayFeasible) {
  for (const auto& pr : {blocks_problem(1.0), generate_problem("monotone_affine", {{"set_kind", "entropy_simplex"}})}) {
    BsmpConfig cfg;
    cfg.iterations = 2000;
    cfg.averaging_exponent = -1.0;
    cfg.schedule = StepsizeSchedule::inverse_sqrt(2.0);
    const auto trace = run_bsmp(pr, cfg, [&](std::uint64_t, const BlockVector& x) { ASSERT_TRUE(pr.contains(x)); });
    for (const auto& cp : trace.checkpoints) EXPECT_TRUE(pr.contains(*cp.average, 1e-9));
  }
}

TEST(RunBsmp, AverageMatchesDirectWeightedSum) {
  const auto pr = blocks_problem();
  BsmpConfig cfg;
  cfg.iterations = 300;
  cfg.averaging_exponent = 0.5;
  cfg.schedule = StepsizeSchedule::inverse_sqrt(1.5);
  cfg.checkpoints.extra = {300};
  Vector num = Vector::Zero(pr.dim());
  double den = 0.0;
  const auto trace = run_bsmp(pr, cfg, [&](std::uint64_t k, const BlockVector& x) {
    const double w = std::pow(cfg.schedule(k), 0.5);
    num += w * x.values();
    den += w;
  });
  EXPECT_NEAR(trace.checkpoints.back().weight_sum, den, 1e-12 * den);
  EXPECT_LE((trace.checkpoints.back().average->values() - num / den).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(RunSmp, OneBlockZeroNoiseMatchesExtragradient) {
  const auto pr = line_problem(0.0);
  SmpConfig cfg;
  cfg.iterations = 50;
  cfg.schedule = StepsizeSchedule::inverse_sqrt(0.7);
  cfg.initial_point = pr.make_vector(Vector::Constant(1, -0.9));
  std::vector<double> seen;
  run_smp(pr, cfg, [&](std::uint64_t, const BlockVector& x) { seen.push_back(x.values()[0]); });
  double x = -0.9;
  ASSERT_EQ(seen.size(), 51u);
  for (std::uint64_t k = 0; k <= 50; ++k) {
    EXPECT_NEAR(seen[k], x, 1e-15);
    const double g = 0.7 / std::sqrt(k + 1.0);
    const double y = std::clamp(x - g * 2.0 * (x - 0.3), -1.0, 1.0);
    x = std::clamp(x - g * 2.0 * (y - 0.3), -1.0, 1.0);
  }
}

TEST(RunSmp, AverageOfExtrapolatedPoints) {
  const auto pr = blocks_problem();
  SmpConfig cfg;
  cfg.iterations = 1;
  cfg.seed = 4;
  const auto trace = run_smp(pr, cfg);
  ASSERT_EQ(trace.checkpoints.size(), 2u);
  EXPECT_FALSE(trace.checkpoints[0].average.has_value());
  RandomStream extra(4, Substream::ExtraNoise), main(4, Substream::MainNoise);
  const auto& x0 = trace.checkpoints[0].iterate;
  const BlockVector f = sample_map(pr, x0, extra, NoiseChannel::Extra);
  Vector y(pr.dim());
  for (std::size_t i = 0; i < pr.num_blocks(); ++i)
    y.segment(pr.layout().offset(i), 2) = prox_map(pr.geometry(i), x0.block(i), cfg.schedule(0) * f.block(i));
  EXPECT_LE((trace.checkpoints[1].average->values() - y).norm(), 1e-14);
}

TEST(Validation, NamedViolations) {
  auto violation = [](auto fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      return e.violation();
    }
    return std::string("none");
  };
  BsmpConfig cfg;
  cfg.block_probs = {0.5, 0.5};
  EXPECT_EQ(violation([&] { validate(cfg, 3); }), "block_probs_length");
  cfg.block_probs = {0.5, 0.6, -0.1};
  EXPECT_EQ(violation([&] { validate(cfg, 3); }), "block_prob_not_positive");
  cfg.block_probs = {0.5, 0.6, 0.1};
  EXPECT_EQ(violation([&] { validate(cfg, 3); }), "block_probs_not_normalized");
  cfg.block_probs = {};
  cfg.averaging_exponent = 1.0;
  EXPECT_EQ(violation([&] { validate(cfg, 3); }), "averaging_exponent_not_below_one");
  EXPECT_EQ(violation([] { StepsizeSchedule::harmonic(0.0); }), "stepsize_not_positive");
  const auto pr = blocks_problem();
  BsmpConfig bad;
  bad.initial_point = pr.make_vector(Vector::Constant(pr.dim(), 5.0));
  EXPECT_EQ(violation([&] { run_bsmp(pr, bad); }), "initial_point_infeasible");
}

TEST(Stepsize, Schedules) {
  const auto h = StepsizeSchedule::harmonic(4.0);
  EXPECT_DOUBLE_EQ(h(0), 4.0);
  EXPECT_DOUBLE_EQ(h(1), 4.0);
  EXPECT_DOUBLE_EQ(h(8), 0.5);
  const auto s = StepsizeSchedule::inverse_sqrt(3.0);
  EXPECT_DOUBLE_EQ(s(0), 3.0);
  EXPECT_DOUBLE_EQ(s(8), 1.0);
  EXPECT_DOUBLE_EQ(StepsizeSchedule::from_json(s.to_json())(8), 1.0);
}

TEST(AutoGamma0, FormulaExamples) {
  StronglyMonotoneAffineParams p;
  p.blocks = 8;
  p.block_size = 4;
  p.modulus = 0.5;
  EXPECT_NEAR(auto_gamma0(make_strongly_monotone_affine(p), RateRegime::StronglyPseudoMonotone), 16.0, 1e-12);
  const auto one = line_problem(0.0);
  ProblemConstants c = one.constants();
  c.modulus = 1.0;
  ScviProblem unit = one;
  unit.set_constants(c);
  EXPECT_NEAR(auto_gamma0(unit, RateRegime::StronglyPseudoMonotone), 1.0, 1e-15);
  ScopQuadraticParams q;
  q.blocks = 9;
  EXPECT_NEAR(auto_gamma0(make_scop_quadratic(q), RateRegime::ConvexAveraged, 2.0), 6.0, 1e-15);
}

TEST(Averaging, Examples) {
  // constant γ with r = 0 gives the running mean
  double s = 1.0;
  Vector avg = Vector::Constant(1, 2.0);
  std::tie(s, avg) = weighted_average_update(s, avg, Vector::Constant(1, 4.0), 0.3, 0.0);
  std::tie(s, avg) = weighted_average_update(s, avg, Vector::Constant(1, 9.0), 0.3, 0.0);
  EXPECT_DOUBLE_EQ(s, 3.0);
  EXPECT_NEAR(avg[0], 5.0, 1e-15);
  WeightedAverager acc(1);
  acc.add(Vector::Constant(1, 7.0), std::pow(0.2, -1.0));
  EXPECT_DOUBLE_EQ(acc.average()[0], 7.0);
}

TEST(Checkpoints, PlanContents) {
  CheckpointPlan plan;
  plan.linear_count = 4;
  plan.extra = {3, 1000};
  const std::vector<std::uint64_t> expected{0, 1, 2, 3, 4, 5, 8, 10, 15, 16, 20};
  EXPECT_EQ(plan.iterations(20), expected);
}
