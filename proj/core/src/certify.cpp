#include "scvi/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scvi/error.hpp"
#include "scvi/serialization.hpp"

namespace scvi {

namespace {

// Uniform samples, with every fourth sample pushed onto the boundary.
BlockVector certificate_point(const ScviProblem& problem, RandomStream& rng, std::size_t t) {
  BlockVector x = problem.sample_point(rng);
  if (t % 4 != 3) return x;
  const BlockVector c = problem.center();
  Vector pushed = c.values() + 2.0 * (x.values() - c.values());
  return problem.project(problem.make_vector(std::move(pushed)));
}

double composite_dist2(const ScviProblem& problem, const BlockVector& x, const BlockVector& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < problem.num_blocks(); ++i) {
    const double n = problem.geometry(i).norm(x.block(i) - y.block(i));
    s += n * n;
  }
  return s;
}

bool is_pseudo(MonotonicityKind k) {
  return k == MonotonicityKind::PseudoMonotone || k == MonotonicityKind::StrictlyPseudoMonotone ||
         k == MonotonicityKind::StronglyPseudoMonotone;
}

bool is_strong(MonotonicityKind k) {
  return k == MonotonicityKind::StronglyMonotone || k == MonotonicityKind::StronglyPseudoMonotone;
}

bool is_strict(MonotonicityKind k) {
  return k == MonotonicityKind::StrictlyMonotone || k == MonotonicityKind::StrictlyPseudoMonotone;
}

}  // namespace

nlohmann::json MonotonicityCertificate::to_json() const {
  nlohmann::json j = {{"class", to_string(kind)},
                      {"modulus", modulus},
                      {"samples", samples},
                      {"premise_pairs", premise_pairs},
                      {"passed", passed},
                      {"worst_margin", worst_margin}};
  if (violating_pair)
    j["violating_pair"] = {vector_to_json(violating_pair->first.values()),
                           vector_to_json(violating_pair->second.values())};
  return j;
}

MonotonicityCertificate certify_monotonicity(const ScviProblem& problem, MonotonicityClass cls,
                                             std::size_t samples, std::uint64_t seed) {
  if (samples < 1) throw DomainError("certificate needs at least one sample");
  MonotonicityCertificate cert;
  cert.kind = cls.kind;
  cert.modulus = cls.modulus;
  cert.samples = samples;
  cert.worst_margin = std::numeric_limits<double>::infinity();
  const bool pseudo = is_pseudo(cls.kind);
  const bool strong = is_strong(cls.kind);
  const bool strict = is_strict(cls.kind);
  if (strong && !(cls.modulus > 0.0)) throw DomainError("strong classes need a positive modulus");
  RandomStream rng(seed, Substream::Sampling, 1);
  double worst_violation = 0.0;

  auto check = [&](const BlockVector& x, const BlockVector& y, const Vector& fx,
                   const Vector& fy) {
    const Vector diff = x.values() - y.values();
    const double dist2 = composite_dist2(problem, x, y);
    if (dist2 == 0.0) return;
    double q;
    if (pseudo) {
      if (fy.dot(diff) < 0.0) return;
      ++cert.premise_pairs;
      q = fx.dot(diff);
    } else {
      q = (fx - fy).dot(diff);
    }
    const double scale = std::max(1.0, (fx.norm() + fy.norm()) * diff.norm());
    double margin = strong || strict ? q / dist2 : q;
    bool ok;
    if (strong)
      ok = margin >= cls.modulus * (1.0 - 1e-10) - 1e-12 * scale / dist2;
    else if (strict)
      ok = q > 0.0;
    else
      ok = q >= -1e-12 * scale;
    cert.worst_margin = std::min(cert.worst_margin, margin);
    if (!ok) {
      cert.passed = false;
      const double violation = strong ? cls.modulus - margin : -q;
      if (!cert.violating_pair || violation > worst_violation) {
        worst_violation = violation;
        cert.violating_pair.emplace(x, y);
      }
    }
  };

  for (std::size_t t = 0; t < samples; ++t) {
    const BlockVector x = certificate_point(problem, rng, t);
    const BlockVector y = certificate_point(problem, rng, t + 1);
    const Vector fx = problem.map().value(x.values());
    const Vector fy = problem.map().value(y.values());
    check(x, y, fx, fy);
    if (pseudo) check(y, x, fy, fx);
    if (cls.kind == MonotonicityKind::ConvexGradient && problem.objective()) {
      const auto& f = *problem.objective();
      const double gap = f.value(y.values()) - f.value(x.values()) - fx.dot(y.values() - x.values());
      if (gap < -1e-10 * std::max(1.0, std::abs(f.value(y.values())))) {
        cert.passed = false;
        if (!cert.violating_pair) cert.violating_pair.emplace(x, y);
      }
    }
  }
  if (!std::isfinite(cert.worst_margin)) cert.worst_margin = 0.0;
  return cert;
}

nlohmann::json ConstantsCertificate::to_json() const {
  return {{"method", method},
          {"samples", samples},
          {"sampled_map_bound", sampled_map_bound},
          {"sampled_lipschitz", sampled_lipschitz},
          {"map_bound_ok", map_bound_ok},
          {"lipschitz_ok", lipschitz_ok}};
}

namespace {

struct SampledBounds {
  std::vector<double> map_bound;
  std::vector<double> lipschitz;
};

SampledBounds sample_bounds(const ScviProblem& problem, std::size_t samples, std::uint64_t seed) {
  const std::size_t d = problem.num_blocks();
  SampledBounds out{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  RandomStream rng(seed, Substream::Sampling, 2);
  for (std::size_t t = 0; t < samples; ++t) {
    const BlockVector x = certificate_point(problem, rng, t);
    for (std::size_t i = 0; i < d; ++i)
      out.map_bound[i] =
          std::max(out.map_bound[i], problem.geometry(i).dual_norm(problem.expected_block(i, x)));
    // Block perturbation: far (fresh block sample) on even t, near on odd t.
    const std::size_t i = t % d;
    const BlockGeometry& g = problem.geometry(i);
    BlockVector xp = x;
    if (t % 2 == 0) {
      xp.block(i) = g.set().sample(rng);
    } else {
      const Vector target = g.set().sample(rng);
      xp.block(i) = x.block(i) + 1e-3 * (target - x.block(i));
    }
    const double h = g.norm(xp.block(i) - x.block(i));
    if (h < 1e-14) continue;
    const double df = g.dual_norm(problem.expected_block(i, xp) - problem.expected_block(i, x));
    out.lipschitz[i] = std::max(out.lipschitz[i], df / h);
  }
  return out;
}

}  // namespace

ConstantsCertificate certify_constants(const ScviProblem& problem, std::size_t samples,
                                       std::uint64_t seed) {
  ConstantsCertificate cert;
  const ProblemConstants& c = problem.constants();
  if (c.map_bound.size() != problem.num_blocks() || c.lipschitz.size() != problem.num_blocks())
    throw DomainError("problem has no constants to certify");
  cert.method = c.method;
  cert.samples = samples;
  const SampledBounds s = sample_bounds(problem, samples, seed);
  cert.sampled_map_bound = s.map_bound;
  cert.sampled_lipschitz = s.lipschitz;
  for (std::size_t i = 0; i < problem.num_blocks(); ++i) {
    if (s.map_bound[i] > c.map_bound[i] * (1.0 + 1e-9) + 1e-12) cert.map_bound_ok = false;
    if (s.lipschitz[i] > c.lipschitz[i] * (1.0 + 1e-6) + 1e-9) cert.lipschitz_ok = false;
  }
  return cert;
}

ProblemConstants sampled_constants(const ScviProblem& problem, std::size_t samples,
                                   std::uint64_t seed, double safety) {
  const SampledBounds s = sample_bounds(problem, samples, seed);
  ProblemConstants c = problem.constants();
  const std::size_t d = problem.num_blocks();
  c.bound.assign(d, 0.0);
  c.noise.assign(d, 0.0);
  c.noise_tilde.assign(d, 0.0);
  c.map_bound = s.map_bound;
  c.lipschitz = s.lipschitz;
  for (std::size_t i = 0; i < d; ++i) {
    const double root_n = std::sqrt(static_cast<double>(problem.geometry(i).dim()));
    c.bound[i] = problem.geometry(i).bound();
    c.map_bound[i] *= safety;
    c.lipschitz[i] *= safety;
    c.noise[i] = problem.noise().coord_std[i] * root_n;
    c.noise_tilde[i] = problem.noise().coord_std_tilde[i] * root_n;
  }
  c.method = "sampled";
  return c;
}

}  // namespace scvi
