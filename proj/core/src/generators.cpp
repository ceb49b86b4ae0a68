#include "scvi/generators.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "scvi/error.hpp"
#include "scvi/reference_solver.hpp"

namespace scvi {

namespace {

struct SetKindName {
  SetKind kind;
  const char* name;
};

constexpr SetKindName kSetKindNames[] = {
    {SetKind::UnitBox, "unit_box"},
    {SetKind::SymmetricBox, "symmetric_box"},
    {SetKind::UnitBall, "unit_ball"},
    {SetKind::Simplex, "simplex"},
    {SetKind::EntropySimplex, "entropy_simplex"},
};

Matrix gaussian_matrix(Index rows, Index cols, RandomStream& rng) {
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = rng.normal();
  return m;
}

Vector gaussian_vector(Index n, RandomStream& rng) {
  Vector v(n);
  for (Index j = 0; j < n; ++j) v[j] = rng.normal();
  return v;
}

Matrix random_orthogonal(Index n, RandomStream& rng) {
  Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(n, n, rng));
  Matrix q = qr.householderQ();
  // Sign fix makes the distribution Haar.
  const Vector diag = qr.matrixQR().diagonal();
  for (Index j = 0; j < n; ++j)
    if (diag[j] < 0.0) q.col(j) = -q.col(j);
  return q;
}

double spectral_norm(const Matrix& m) { return operator_norm(m, NormKind::L2, NormKind::L2); }

Matrix scaled_to_norm(Matrix m, double target) {
  const double n = spectral_norm(m);
  if (target <= 0.0 || n == 0.0) return Matrix::Zero(m.rows(), m.cols());
  return m * (target / n);
}

Matrix random_skew(Index n, double norm, RandomStream& rng) {
  const Matrix g = gaussian_matrix(n, n, rng);
  return scaled_to_norm(g - g.transpose(), norm);
}

double min_sym_eigenvalue(const Matrix& a) {
  const Matrix s = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Vector interior_point(const std::vector<BlockGeometry>& geoms, RandomStream& rng) {
  Index n = 0;
  for (const auto& g : geoms) n += g.dim();
  Vector x(n);
  Index off = 0;
  for (const auto& g : geoms) {
    if (const auto* box = std::get_if<Box>(&g.set().kind()))
      if (((box->upper - box->lower).array() <= 0.0).any())
        throw DomainError("degenerate box has no interior point");
    const Vector c = g.set().center();
    x.segment(off, g.dim()) = c + 0.8 * (g.set().sample(rng) - c);
    off += g.dim();
  }
  return x;
}

// Composite-norm modulus from a Euclidean one: ‖h^i‖₁² ≤ n_i‖h^i‖₂².
double composite_modulus(const std::vector<BlockGeometry>& geoms, double mu2) {
  double worst = 1.0;
  for (const auto& g : geoms)
    if (g.norm_kind() == NormKind::L1) worst = std::max(worst, static_cast<double>(g.dim()));
  return mu2 / worst;
}

BlockVector solve_for_solution(const ScviProblem& problem) {
  ReferenceSolveOptions opts;
  const auto res = solve_deterministic(problem, problem.center(), opts);
  if (!res.converged)
    throw Error("reference solve did not reach tolerance (residual " +
                std::to_string(res.residual) + ")");
  return res.solution;
}

void check_sizes(std::size_t blocks, Index size) {
  if (blocks < 1) throw DomainError("need at least one block");
  if (size < 1) throw DomainError("block size must be positive");
}

}  // namespace

std::string to_string(SetKind kind) {
  for (const auto& kn : kSetKindNames)
    if (kn.kind == kind) return kn.name;
  return "unknown";
}

SetKind set_kind_from_string(const std::string& name) {
  for (const auto& kn : kSetKindNames)
    if (name == kn.name) return kn.kind;
  throw DomainError("unknown set kind '" + name + "'");
}

std::vector<BlockGeometry> make_geometries(std::size_t blocks, Index block_size, SetKind kind) {
  check_sizes(blocks, block_size);
  std::vector<BlockGeometry> out;
  for (std::size_t i = 0; i < blocks; ++i) {
    switch (kind) {
      case SetKind::UnitBox:
        out.push_back(BlockGeometry::euclidean(ComponentSet::unit_box(block_size)));
        break;
      case SetKind::SymmetricBox:
        out.push_back(BlockGeometry::euclidean(
            ComponentSet::box(-Vector::Ones(block_size), Vector::Ones(block_size))));
        break;
      case SetKind::UnitBall:
        out.push_back(BlockGeometry::euclidean(ComponentSet::ball(Vector::Zero(block_size), 1.0)));
        break;
      case SetKind::Simplex:
        out.push_back(BlockGeometry::euclidean(ComponentSet::simplex(block_size)));
        break;
      case SetKind::EntropySimplex:
        out.push_back(BlockGeometry::entropy(block_size));
        break;
    }
  }
  return out;
}

ScviProblem make_affine_problem(std::vector<BlockGeometry> geometries, Matrix a,
                                const Vector& interior_point, NoiseModel noise,
                                MonotonicityClass cls) {
  Vector b = -(a * interior_point);
  auto map = std::make_shared<AffineMapping>(std::move(a), std::move(b));
  std::optional<double> modulus;
  if (cls.kind == MonotonicityKind::StronglyMonotone ||
      cls.kind == MonotonicityKind::StronglyPseudoMonotone)
    modulus = cls.modulus;
  ProblemConstants constants = analytic_constants(geometries, *map, noise, modulus);
  ScviProblem problem(std::move(geometries), map, std::move(noise), cls);
  const BlockVector xbar = problem.make_vector(interior_point);
  if (!problem.contains(xbar)) throw DomainError("interior point is not feasible");
  problem.set_known_solution(xbar);
  problem.set_constants(std::move(constants));
  return problem;
}

ScviProblem make_strongly_monotone_affine(const StronglyMonotoneAffineParams& p) {
  check_sizes(p.blocks, p.block_size);
  if (!(p.modulus > 0.0)) throw DomainError("strong monotonicity modulus must be positive");
  if (!(p.lipschitz_bound >= p.modulus)) throw DomainError("need lipschitz_bound >= modulus");
  if (!(p.psd_share >= 0.0 && p.psd_share <= 1.0)) throw DomainError("psd_share must lie in [0,1]");
  if (!(p.noise_std >= 0.0)) throw DomainError("noise std must be nonnegative");
  RandomStream rng(p.seed, Substream::Generator);
  auto geoms = make_geometries(p.blocks, p.block_size, p.set_kind);
  const Index n = static_cast<Index>(p.blocks) * p.block_size;
  const double spare = p.lipschitz_bound - p.modulus;
  const Matrix s = random_skew(n, spare * (1.0 - p.psd_share), rng);
  const Matrix v = random_orthogonal(n, rng);
  Vector lambda(n);
  for (Index j = 0; j < n; ++j) lambda[j] = rng.uniform(0.0, spare * p.psd_share);
  const Matrix q = v * lambda.asDiagonal() * v.transpose();
  Matrix a = p.modulus * Matrix::Identity(n, n) + s + q;
  const Vector xbar = interior_point(geoms, rng);
  const double mu = composite_modulus(geoms, p.modulus);
  ScviProblem problem =
      make_affine_problem(std::move(geoms), std::move(a), xbar, NoiseModel::uniform(p.blocks, p.noise_std),
                          {MonotonicityKind::StronglyPseudoMonotone, mu});
  nlohmann::json params = p;
  problem.set_generator({"strongly_monotone_affine", params, p.seed});
  return problem;
}

ScviProblem make_monotone_affine(const MonotoneAffineParams& p) {
  check_sizes(p.blocks, p.block_size);
  if (!(p.skew_norm >= 0.0) || !(p.psd_scale >= 0.0)) throw DomainError("norms must be nonnegative");
  if (!(p.noise_std >= 0.0)) throw DomainError("noise std must be nonnegative");
  RandomStream rng(p.seed, Substream::Generator);
  auto geoms = make_geometries(p.blocks, p.block_size, p.set_kind);
  const Index n = static_cast<Index>(p.blocks) * p.block_size;
  const Matrix s = random_skew(n, p.skew_norm, rng);
  Matrix q = Matrix::Zero(n, n);
  if (p.psd_rank > 0) {
    const Matrix g = gaussian_matrix(n, static_cast<Index>(p.psd_rank), rng);
    q = scaled_to_norm(g * g.transpose(), p.psd_scale);
  }
  const Vector xbar = interior_point(geoms, rng);
  ScviProblem problem = make_affine_problem(std::move(geoms), s + q, xbar,
                                            NoiseModel::uniform(p.blocks, p.noise_std),
                                            {MonotonicityKind::Monotone, 0.0});
  nlohmann::json params = p;
  problem.set_generator({"monotone_affine", params, p.seed});
  return problem;
}

ScviProblem make_strictly_pseudo_monotone(const ScviProblem& base) {
  return make_strictly_pseudo_monotone(base, SineScaling::standard(base.dim()));
}

ScviProblem make_strictly_pseudo_monotone(const ScviProblem& base, SineScaling scaling) {
  const auto kind = base.monotonicity().kind;
  if (kind != MonotonicityKind::StronglyMonotone && kind != MonotonicityKind::StronglyPseudoMonotone)
    throw DomainError("scaled instances need a strongly monotone base");
  RandomStream rng(0x5ca1eULL, Substream::Sampling);
  for (int t = 0; t < 1000; ++t)
    if (!(scaling.value(base.sample_point(rng).values()) >= scaling.min_value() - 1e-12))
      throw DomainError("scaling is not bounded away from zero on samples");
  const double smin = scaling.min_value();
  auto map = std::make_shared<ScaledMapping>(base.map_ptr(), scaling);
  std::vector<BlockGeometry> geoms(base.geometries().begin(), base.geometries().end());
  // ⟨F̃(x), x − y⟩ ≥ s_min μ ‖x − y‖² whenever ⟨F̃(y), x − y⟩ ≥ 0.
  std::optional<double> modulus;
  if (base.constants().modulus) modulus = smin * *base.constants().modulus;
  ProblemConstants constants = analytic_constants(geoms, *map, base.noise(), modulus);
  ScviProblem problem(std::move(geoms), map, base.noise(),
                      {MonotonicityKind::StrictlyPseudoMonotone, 0.0});
  if (base.known_solution()) problem.set_known_solution(*base.known_solution());
  problem.set_constants(std::move(constants));
  if (base.generator()) {
    nlohmann::json params = {{"base", {{"name", base.generator()->name},
                                       {"params", base.generator()->params}}},
                             {"scaling",
                              {{"offset", scaling.offset},
                               {"amplitude", scaling.amplitude},
                               {"direction", std::vector<double>(scaling.direction.data(),
                                                                 scaling.direction.data() +
                                                                     scaling.direction.size())}}}};
    problem.set_generator({"strictly_pseudo_monotone", params, base.generator()->seed});
  }
  return problem;
}

ScviProblem make_quadratic_problem(std::vector<BlockGeometry> geometries, Matrix hessian,
                                   Vector linear, NoiseModel noise) {
  if (hessian.rows() != hessian.cols() || hessian.rows() != linear.size())
    throw DimensionError("quadratic data shape mismatch");
  if (!hessian.isApprox(hessian.transpose(), 1e-12)) throw DomainError("hessian must be symmetric");
  if (min_sym_eigenvalue(hessian) < -1e-12) throw DomainError("negative curvature requested");
  auto map = std::make_shared<AffineMapping>(hessian, linear);
  ProblemConstants constants = analytic_constants(geometries, *map, noise, std::nullopt);
  ScviProblem problem(std::move(geometries), map, std::move(noise),
                      {MonotonicityKind::ConvexGradient, 0.0});
  problem.set_constants(std::move(constants));
  const BlockVector xstar = solve_for_solution(problem);
  QuadraticObjective f{std::move(hessian), std::move(linear), 0.0};
  f.optimal_value = f.value(xstar.values());
  problem.set_objective(std::move(f));
  problem.set_known_solution(xstar);
  return problem;
}

ScviProblem make_scop_quadratic(const ScopQuadraticParams& p) {
  check_sizes(p.blocks, p.block_size);
  const Index n = static_cast<Index>(p.blocks) * p.block_size;
  RandomStream rng(p.seed, Substream::Generator);
  Vector lambda(n);
  if (!p.spectrum.empty()) {
    if (static_cast<Index>(p.spectrum.size()) != n)
      throw DimensionError("spectrum needs one eigenvalue per coordinate");
    for (Index j = 0; j < n; ++j) lambda[j] = p.spectrum[j];
  } else {
    if (static_cast<Index>(p.zero_eigenvalues) > n) throw DomainError("too many zero eigenvalues");
    for (Index j = 0; j < n; ++j)
      lambda[j] = j < static_cast<Index>(p.zero_eigenvalues) ? 0.0 : rng.uniform(0.0, p.curvature_max);
  }
  if ((lambda.array() < 0.0).any() || !lambda.allFinite())
    throw DomainError("negative curvature requested");
  const Matrix v = random_orthogonal(n, rng);
  Matrix h = v * lambda.asDiagonal() * v.transpose();
  h = 0.5 * (h + h.transpose());
  Vector c = p.linear_scale * gaussian_vector(n, rng);
  ScviProblem problem = make_quadratic_problem(make_geometries(p.blocks, p.block_size, p.set_kind),
                                               std::move(h), std::move(c),
                                               NoiseModel::uniform(p.blocks, p.noise_std));
  nlohmann::json params = p;
  problem.set_generator({"scop_quadratic", params, p.seed});
  return problem;
}

ScviProblem make_nash_quadratic(const NashQuadraticParams& p) {
  check_sizes(p.players, p.strategy_size);
  if (!(p.coupling >= 0.0)) throw DomainError("coupling must be nonnegative");
  if (!(p.curvature_min > 0.0 && p.curvature_max >= p.curvature_min))
    throw DomainError("need 0 < curvature_min <= curvature_max");
  RandomStream rng(p.seed, Substream::Generator);
  const Index m = p.strategy_size;
  const Index n = static_cast<Index>(p.players) * m;
  Matrix a = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < p.players; ++i) {
    const Matrix v = random_orthogonal(m, rng);
    Vector lambda(m);
    for (Index j = 0; j < m; ++j) lambda[j] = rng.uniform(p.curvature_min, p.curvature_max);
    const Matrix h = v * lambda.asDiagonal() * v.transpose();
    a.block(static_cast<Index>(i) * m, static_cast<Index>(i) * m, m, m) = 0.5 * (h + h.transpose());
  }
  for (std::size_t i = 0; i < p.players; ++i)
    for (std::size_t j = 0; j < p.players; ++j) {
      if (i == j) continue;
      a.block(static_cast<Index>(i) * m, static_cast<Index>(j) * m, m, m) =
          scaled_to_norm(gaussian_matrix(m, m, rng), p.coupling);
    }
  const double mu2 = min_sym_eigenvalue(a);
  if (!(mu2 > 0.0))
    throw DomainError("coupling too strong: symmetric part has eigenvalue " + std::to_string(mu2));
  Vector c = p.linear_scale * gaussian_vector(n, rng);
  auto geoms = make_geometries(p.players, m, p.set_kind);
  auto map = std::make_shared<AffineMapping>(a, c);
  const double mu = composite_modulus(geoms, mu2);
  NoiseModel noise = NoiseModel::uniform(p.players, p.noise_std);
  ProblemConstants constants = analytic_constants(geoms, *map, noise, mu);
  ScviProblem problem(std::move(geoms), map, std::move(noise),
                      {MonotonicityKind::StronglyMonotone, mu});
  problem.set_constants(std::move(constants));
  problem.set_known_solution(solve_for_solution(problem));
  nlohmann::json params = p;
  problem.set_generator({"nash_quadratic", params, p.seed});
  return problem;
}

ScviProblem generate_problem(const std::string& name, const nlohmann::json& params) {
  if (name == "strongly_monotone_affine")
    return make_strongly_monotone_affine(params.get<StronglyMonotoneAffineParams>());
  if (name == "monotone_affine") return make_monotone_affine(params.get<MonotoneAffineParams>());
  if (name == "scop_quadratic") return make_scop_quadratic(params.get<ScopQuadraticParams>());
  if (name == "nash_quadratic") return make_nash_quadratic(params.get<NashQuadraticParams>());
  if (name == "strictly_pseudo_monotone") {
    const auto& base_spec = params.at("base");
    const ScviProblem base =
        generate_problem(base_spec.at("name").get<std::string>(), base_spec.at("params"));
    SineScaling scaling = SineScaling::standard(base.dim());
    if (params.contains("scaling")) {
      const auto& s = params.at("scaling");
      scaling.offset = s.value("offset", scaling.offset);
      scaling.amplitude = s.value("amplitude", scaling.amplitude);
      if (s.contains("direction")) {
        const auto d = s.at("direction").get<std::vector<double>>();
        if (static_cast<Index>(d.size()) != base.dim())
          throw DimensionError("scaling direction length mismatch");
        scaling.direction = Eigen::Map<const Vector>(d.data(), base.dim());
      }
    }
    return make_strictly_pseudo_monotone(base, scaling);
  }
  throw DomainError("unknown generator '" + name + "'");
}

void to_json(nlohmann::json& j, const StronglyMonotoneAffineParams& p) {
  j = {{"blocks", p.blocks},         {"block_size", p.block_size},
       {"modulus", p.modulus},       {"lipschitz_bound", p.lipschitz_bound},
       {"noise_std", p.noise_std},   {"psd_share", p.psd_share},
       {"set_kind", to_string(p.set_kind)}, {"seed", p.seed}};
}

void from_json(const nlohmann::json& j, StronglyMonotoneAffineParams& p) {
  const StronglyMonotoneAffineParams def;
  p.blocks = j.value("blocks", def.blocks);
  p.block_size = j.value("block_size", def.block_size);
  p.modulus = j.value("modulus", def.modulus);
  p.lipschitz_bound = j.value("lipschitz_bound", def.lipschitz_bound);
  p.noise_std = j.value("noise_std", def.noise_std);
  p.psd_share = j.value("psd_share", def.psd_share);
  p.set_kind = set_kind_from_string(j.value("set_kind", to_string(def.set_kind)));
  p.seed = j.value("seed", def.seed);
}

void to_json(nlohmann::json& j, const MonotoneAffineParams& p) {
  j = {{"blocks", p.blocks},       {"block_size", p.block_size}, {"skew_norm", p.skew_norm},
       {"psd_rank", p.psd_rank},   {"psd_scale", p.psd_scale},   {"noise_std", p.noise_std},
       {"set_kind", to_string(p.set_kind)}, {"seed", p.seed}};
}

void from_json(const nlohmann::json& j, MonotoneAffineParams& p) {
  const MonotoneAffineParams def;
  p.blocks = j.value("blocks", def.blocks);
  p.block_size = j.value("block_size", def.block_size);
  p.skew_norm = j.value("skew_norm", def.skew_norm);
  p.psd_rank = j.value("psd_rank", def.psd_rank);
  p.psd_scale = j.value("psd_scale", def.psd_scale);
  p.noise_std = j.value("noise_std", def.noise_std);
  p.set_kind = set_kind_from_string(j.value("set_kind", to_string(def.set_kind)));
  p.seed = j.value("seed", def.seed);
}

void to_json(nlohmann::json& j, const ScopQuadraticParams& p) {
  j = {{"blocks", p.blocks},
       {"block_size", p.block_size},
       {"spectrum", p.spectrum},
       {"curvature_max", p.curvature_max},
       {"zero_eigenvalues", p.zero_eigenvalues},
       {"linear_scale", p.linear_scale},
       {"noise_std", p.noise_std},
       {"set_kind", to_string(p.set_kind)},
       {"seed", p.seed}};
}

void from_json(const nlohmann::json& j, ScopQuadraticParams& p) {
  const ScopQuadraticParams def;
  p.blocks = j.value("blocks", def.blocks);
  p.block_size = j.value("block_size", def.block_size);
  p.spectrum = j.value("spectrum", def.spectrum);
  p.curvature_max = j.value("curvature_max", def.curvature_max);
  p.zero_eigenvalues = j.value("zero_eigenvalues", def.zero_eigenvalues);
  p.linear_scale = j.value("linear_scale", def.linear_scale);
  p.noise_std = j.value("noise_std", def.noise_std);
  p.set_kind = set_kind_from_string(j.value("set_kind", to_string(def.set_kind)));
  p.seed = j.value("seed", def.seed);
}

void to_json(nlohmann::json& j, const NashQuadraticParams& p) {
  j = {{"players", p.players},
       {"strategy_size", p.strategy_size},
       {"coupling", p.coupling},
       {"curvature_min", p.curvature_min},
       {"curvature_max", p.curvature_max},
       {"linear_scale", p.linear_scale},
       {"noise_std", p.noise_std},
       {"set_kind", to_string(p.set_kind)},
       {"seed", p.seed}};
}

void from_json(const nlohmann::json& j, NashQuadraticParams& p) {
  const NashQuadraticParams def;
  p.players = j.value("players", def.players);
  p.strategy_size = j.value("strategy_size", def.strategy_size);
  p.coupling = j.value("coupling", def.coupling);
  p.curvature_min = j.value("curvature_min", def.curvature_min);
  p.curvature_max = j.value("curvature_max", def.curvature_max);
  p.linear_scale = j.value("linear_scale", def.linear_scale);
  p.noise_std = j.value("noise_std", def.noise_std);
  p.set_kind = set_kind_from_string(j.value("set_kind", to_string(def.set_kind)));
  p.seed = j.value("seed", def.seed);
}

}  // namespace scvi
