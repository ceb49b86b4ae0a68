#include "scvi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scvi/error.hpp"

namespace scvi {

namespace {

void check_probs(std::span<const double> p, std::size_t d) {
  if (p.size() != d) throw DimensionError("need one probability per block");
  for (double pi : p)
    if (!(pi > 0.0)) throw DomainError("block probabilities must be positive");
}

void check_constants(const ProblemConstants& c, std::size_t d) {
  if (c.bound.size() != d || c.map_bound.size() != d || c.lipschitz.size() != d ||
      c.noise.size() != d || c.noise_tilde.size() != d)
    throw DimensionError("problem constants need one entry per block");
}

double sum_lomega_b2(const ProblemConstants& c, std::span<const BlockGeometry> geoms,
                     std::span<const double> p) {
  double s = 0.0;
  for (std::size_t i = 0; i < geoms.size(); ++i) {
    const double w = p.empty() ? 1.0 : 1.0 / p[i];
    s += w * geoms[i].l_omega() * c.bound[i] * c.bound[i];
  }
  return s;
}

void check_r(double r) {
  if (!(r < 1.0) || !std::isfinite(r)) throw DomainError("averaging exponent r must be < 1");
}

}  // namespace

double lyapunov(std::span<const double> p, std::span<const BlockGeometry> geoms,
                const BlockVector& x, const BlockVector& y) {
  const std::size_t d = geoms.size();
  check_probs(p, d);
  if (x.num_blocks() != d || y.num_blocks() != d) throw DimensionError("block count mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) s += bregman_distance(geoms[i], x.block(i), y.block(i)) / p[i];
  return s;
}

double mse(std::span<const BlockGeometry> geoms, const BlockVector& x, const BlockVector& y) {
  if (x.size() != y.size()) throw DimensionError("shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < geoms.size(); ++i) {
    const double n = geoms[i].norm(x.block(i) - y.block(i));
    s += n * n;
  }
  return s;
}

double mse(const BlockVector& x, const BlockVector& y) {
  if (x.size() != y.size()) throw DimensionError("shape mismatch");
  return (x.values() - y.values()).squaredNorm();
}

nlohmann::json RateConstants::to_json() const {
  nlohmann::json j = {{"averaged_objective_rate", averaged_objective_rate},
                      {"gap_rate", gap_rate},
                      {"gap_noise", gap_noise},
                      {"theta", theta}};
  j["mse_rate"] = mse_rate ? nlohmann::json(*mse_rate) : nlohmann::json(nullptr);
  return j;
}

double theta_constant(const ProblemConstants& c, std::span<const BlockGeometry> geoms) {
  check_constants(c, geoms.size());
  double s = 0.0;
  for (std::size_t i = 0; i < geoms.size(); ++i) {
    const double ci = c.map_bound[i];
    s += (ci * ci + c.noise[i] * c.noise[i]) / geoms[i].mu_omega() +
         2.0 * c.lipschitz[i] * c.bound[i] * (ci + c.noise_tilde[i]);
  }
  return s;
}

double gap_noise_constant(const ProblemConstants& c, std::span<const BlockGeometry> geoms) {
  check_constants(c, geoms.size());
  double s = 0.0;
  for (std::size_t i = 0; i < geoms.size(); ++i) {
    const double ci = c.map_bound[i];
    s += (2.0 / geoms[i].mu_omega()) *
         (2.0 * ci * ci + c.noise_tilde[i] * c.noise_tilde[i] + 1.25 * c.noise[i] * c.noise[i]);
  }
  return s;
}

RateConstants rate_constants(const ProblemConstants& c, std::span<const BlockGeometry> geoms,
                             std::span<const double> p, const RateParameters& params) {
  const std::size_t d = geoms.size();
  check_probs(p, d);
  check_constants(c, d);
  const double r = params.averaging_exponent;
  check_r(r);
  if (!(params.gamma_factor > 0.0) || !(params.gamma0 > 0.0))
    throw DomainError("stepsize parameters must be positive");
  RateConstants rc;
  rc.theta = theta_constant(c, geoms);
  rc.gap_noise = gap_noise_constant(c, geoms);
  double lmax = 0.0, mu_min = std::numeric_limits<double>::infinity();
  for (const auto& g : geoms) {
    lmax = std::max(lmax, g.l_omega());
    mu_min = std::min(mu_min, g.mu_omega());
  }
  if (c.modulus && *c.modulus > 0.0)
    rc.mse_rate = 4.0 * rc.theta * lmax * lmax / (*c.modulus * *c.modulus * mu_min);
  const double lead = (2.0 - r) * std::pow(2.0, 1.0 - 0.5 * r);
  const double lb2 = sum_lomega_b2(c, geoms, {});
  rc.averaged_objective_rate =
      lead * (2.0 * lb2 / params.gamma_factor + params.gamma_factor * rc.theta / (1.0 - r));
  rc.gap_rate = lead * (4.0 * lb2 / params.gamma0 + params.gamma0 * rc.gap_noise / (1.0 - r));
  return rc;
}

double mse_bound(const RateConstants& rc, std::size_t blocks, double k) {
  if (!rc.mse_rate) throw DomainError("MSE rate constant needs the modulus");
  return *rc.mse_rate * static_cast<double>(blocks) / k;
}

double averaged_objective_bound(const ProblemConstants& c, std::span<const BlockGeometry> geoms,
                                std::span<const double> p, const StepsizeSchedule& schedule,
                                double r, std::uint64_t big_k) {
  check_r(r);
  double sr = 0.0;
  for (std::uint64_t k = 0; k <= big_k; ++k) sr += std::pow(schedule(k), r);
  return averaged_objective_bound(c, geoms, p, schedule, r, big_k, sr);
}

double averaged_objective_bound(const ProblemConstants& c, std::span<const BlockGeometry> geoms,
                                std::span<const double> p, const StepsizeSchedule& schedule,
                                double r, std::uint64_t big_k, double weight_sum) {
  check_probs(p, geoms.size());
  check_r(r);
  double sr1 = 0.0;
  for (std::uint64_t k = 0; k <= big_k; ++k) sr1 += std::pow(schedule(k), r + 1.0);
  const double theta = theta_constant(c, geoms);
  return (2.0 * std::pow(schedule(big_k), r - 1.0) * sum_lomega_b2(c, geoms, p) + theta * sr1) /
         weight_sum;
}

double gap_bound(const ProblemConstants& c, std::span<const BlockGeometry> geoms,
                 const StepsizeSchedule& schedule, double r, std::uint64_t big_k) {
  check_r(r);
  if (big_k < 1) throw DomainError("gap bound needs K >= 1");
  double sr = 0.0, sr1 = 0.0;
  for (std::uint64_t k = 0; k < big_k; ++k) {
    const double g = schedule(k);
    sr += std::pow(g, r);
    sr1 += std::pow(g, r + 1.0);
  }
  const double cc = gap_noise_constant(c, geoms);
  return (4.0 * std::pow(schedule(big_k - 1), r - 1.0) * sum_lomega_b2(c, geoms, {}) + sr1 * cc) / sr;
}

std::uint64_t rate_threshold(double r) {
  check_r(r);
  const double t = std::ceil(std::pow((3.0 - r) / 2.0, 2.0 / (1.0 - r)));
  return std::max<std::uint64_t>(static_cast<std::uint64_t>(t), 3);
}

double one_step_recursion_rhs(const ScviProblem& problem, std::span<const double> p,
                              const ProblemConstants& c, const BlockVector& xk,
                              const BlockVector& x, double gamma) {
  const double l = lyapunov(p, problem.geometries(), xk, x);
  const Vector f = problem.map().value(xk.values());
  return l + gamma * f.dot(x.values() - xk.values()) +
         theta_constant(c, problem.geometries()) * gamma * gamma;
}

RateFit fit_rate(std::span<const std::pair<double, double>> points, double k_min) {
  std::vector<double> lx, ly;
  for (const auto& [k, v] : points) {
    if (k < k_min) continue;
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("rate fit needs positive values");
    if (!(k > 0.0)) throw DomainError("rate fit needs positive iteration counts");
    lx.push_back(std::log(k));
    ly.push_back(std::log(v));
  }
  const std::size_t n = lx.size();
  if (n < 5) throw DomainError("rate fit needs at least 5 checkpoints past k_min");
  const double dn = static_cast<double>(n);
  double mx = 0.0, my = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    mx += lx[t];
    my += ly[t];
  }
  mx /= dn;
  my /= dn;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    sxx += (lx[t] - mx) * (lx[t] - mx);
    sxy += (lx[t] - mx) * (ly[t] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("rate fit needs distinct iteration counts");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = n;
  return fit;
}

}  // namespace scvi
