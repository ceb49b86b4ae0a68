#include "scvi/lemma_checks.hpp"

#include <algorithm>
#include <cmath>

#include "scvi/error.hpp"
#include "scvi/metrics.hpp"

namespace scvi {

nlohmann::json RecursionLemmaReport::to_json() const {
  return {{"alpha", alpha},
          {"beta", beta},
          {"gamma", gamma},
          {"e0", e0},
          {"iterations", iterations},
          {"start", start},
          {"general_bound_holds", general_bound_holds},
          {"general_max_ratio", general_max_ratio},
          {"tight_case", tight_case},
          {"tight_bound_holds", tight_bound_holds},
          {"max_ratio", max_ratio},
          {"worst_k", worst_k},
          {"passed", passed()}};
}

RecursionLemmaReport verify_recursion_lemma(double alpha, double beta, double gamma, double e0,
                                            std::uint64_t iterations) {
  if (!(alpha > 0.0) || !(beta >= 0.0) || !(gamma > 0.0) || !(e0 >= 0.0))
    throw DomainError("recursion lemma needs alpha, gamma > 0 and beta, e0 >= 0");
  if (!(alpha * gamma > 1.0)) throw DomainError("recursion lemma needs gamma > 1/alpha");
  constexpr double kRel = 1e-12;
  RecursionLemmaReport rep;
  rep.alpha = alpha;
  rep.beta = beta;
  rep.gamma = gamma;
  rep.e0 = e0;
  rep.iterations = iterations;
  rep.start = static_cast<std::uint64_t>(std::ceil(alpha * gamma));
  rep.tight_case = std::abs(gamma * alpha - 2.0) <= 1e-12;

  const double tight_const = 8.0 * beta / (alpha * alpha);
  double general_const = 0.0;
  double e = e0;
  for (std::uint64_t k = 0; k <= iterations; ++k) {
    if (k == rep.start)
      general_const = std::max(beta * gamma * gamma / (alpha * gamma - 1.0), static_cast<double>(k) * e);
    if (k >= rep.start && k > 0) {
      const double bound = general_const / static_cast<double>(k);
      if (e > bound * (1.0 + kRel) + 1e-300) rep.general_bound_holds = false;
      if (general_const > 0.0) rep.general_max_ratio = std::max(rep.general_max_ratio, e / bound);
    }
    if (rep.tight_case && k >= 2) {
      const double bound = tight_const / static_cast<double>(k);
      if (e > bound * (1.0 + kRel) + 1e-300) rep.tight_bound_holds = false;
      if (tight_const > 0.0) {
        const double ratio = e / bound;
        if (ratio > rep.max_ratio) {
          rep.max_ratio = ratio;
          rep.worst_k = k;
        }
      }
    }
    if (k == iterations) break;
    const double gk = k == 0 ? gamma : gamma / static_cast<double>(k);
    e = std::max(0.0, (1.0 - alpha * gk) * e + beta * gk * gk);
  }
  return rep;
}

nlohmann::json StepsizeSumReport::to_json() const {
  return {{"gamma0", gamma0},
          {"r", r},
          {"K", k},
          {"sum_r_plus_one", sum_r_plus_one},
          {"upper_bound", upper_bound},
          {"sum_r", sum_r},
          {"lower_bound", lower_bound},
          {"sum_r_plus_one_head", sum_r_plus_one_head},
          {"threshold_upper_bound", threshold_upper_bound},
          {"threshold", threshold},
          {"threshold_met", threshold_met},
          {"upper_holds", upper_holds},
          {"lower_holds", lower_holds},
          {"threshold_bound_holds", threshold_bound_holds},
          {"passed", passed()}};
}

StepsizeSumReport verify_stepsize_sums(double gamma0, double r, std::uint64_t k) {
  if (!(gamma0 > 0.0)) throw DomainError("gamma0 must be positive");
  if (!(r < 1.0)) throw DomainError("r must be < 1");
  if (k < 4) throw DomainError("stepsize sums need K >= 4");
  StepsizeSumReport rep;
  rep.gamma0 = gamma0;
  rep.r = r;
  rep.k = k;
  long double s1 = 0.0L, s0 = 0.0L;
  for (std::uint64_t t = 0; t <= k; ++t) {
    const double g = gamma0 / std::sqrt(static_cast<double>(t) + 1.0);
    const double gr = std::exp(r * std::log(g));
    const long double g1 = static_cast<long double>(gr) * g;
    if (t < k) {
      s0 += gr;
      rep.sum_r_plus_one_head = static_cast<double>(s1 + g1);
    }
    s1 += g1;
  }
  rep.sum_r_plus_one = static_cast<double>(s1);
  rep.sum_r = static_cast<double>(s0);
  const double kd = static_cast<double>(k);
  const double h = 0.5 * (1.0 - r);
  rep.upper_bound = std::pow(gamma0, r + 1.0) * (1.0 + (std::pow(kd + 2.0, h) - 1.0) / h);
  rep.lower_bound = std::pow(gamma0, r) * std::pow(kd + 1.0, 1.0 - 0.5 * r) / (2.0 * (1.0 - 0.5 * r));
  rep.threshold_upper_bound = 4.0 * std::pow(gamma0, r + 1.0) * std::pow(kd + 1.0, h) / (1.0 - r);
  rep.threshold = rate_threshold(r);
  rep.threshold_met = k > rep.threshold;
  rep.upper_holds = rep.sum_r_plus_one <= rep.upper_bound * (1.0 + 1e-12);
  rep.lower_holds = rep.sum_r >= rep.lower_bound * (1.0 - 1e-12);
  rep.threshold_bound_holds =
      !rep.threshold_met || rep.sum_r_plus_one_head <= rep.threshold_upper_bound * (1.0 + 1e-12);
  return rep;
}

}  // namespace scvi
