#include "scvi/problem.hpp"

#include <cmath>

#include "scvi/error.hpp"

namespace scvi {

namespace {

struct KindName {
  MonotonicityKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {MonotonicityKind::Monotone, "monotone"},
    {MonotonicityKind::StrictlyMonotone, "strictly_monotone"},
    {MonotonicityKind::StronglyMonotone, "strongly_monotone"},
    {MonotonicityKind::PseudoMonotone, "pseudo_monotone"},
    {MonotonicityKind::StrictlyPseudoMonotone, "strictly_pseudo_monotone"},
    {MonotonicityKind::StronglyPseudoMonotone, "strongly_pseudo_monotone"},
    {MonotonicityKind::ConvexGradient, "convex_gradient"},
};

std::vector<double> checked_std(const std::vector<double>& v, std::size_t blocks,
                                const char* what) {
  if (v.size() != blocks) throw DimensionError(std::string(what) + " needs one entry per block");
  for (double s : v)
    if (!(s >= 0.0) || !std::isfinite(s))
      throw DomainError(std::string(what) + " must be finite and nonnegative");
  return v;
}

}  // namespace

std::string to_string(MonotonicityKind kind) {
  for (const auto& kn : kKindNames)
    if (kn.kind == kind) return kn.name;
  return "unknown";
}

MonotonicityKind monotonicity_kind_from_string(const std::string& name) {
  for (const auto& kn : kKindNames)
    if (name == kn.name) return kn.kind;
  throw DomainError("unknown monotonicity class '" + name + "'");
}

NoiseModel NoiseModel::uniform(std::size_t blocks, double std) {
  return NoiseModel{std::vector<double>(blocks, std), std::vector<double>(blocks, std)};
}

bool NoiseModel::is_zero() const {
  for (double s : coord_std)
    if (s != 0.0) return false;
  for (double s : coord_std_tilde)
    if (s != 0.0) return false;
  return true;
}

ScviProblem::ScviProblem(std::vector<BlockGeometry> geometries, MappingPtr map, NoiseModel noise,
                         MonotonicityClass cls)
    : geometries_(std::move(geometries)), map_(std::move(map)), class_(cls) {
  if (geometries_.empty()) throw DimensionError("problem needs at least one block");
  if (!map_) throw DomainError("problem needs a mapping");
  std::vector<Index> sizes;
  for (const auto& g : geometries_) sizes.push_back(g.dim());
  layout_ = std::make_shared<const BlockLayout>(sizes);
  if (map_->dim() != layout_->total()) throw DimensionError("mapping dimension mismatch");
  noise_.coord_std = checked_std(noise.coord_std, geometries_.size(), "noise std");
  noise_.coord_std_tilde = noise.coord_std_tilde.empty()
                               ? noise_.coord_std
                               : checked_std(noise.coord_std_tilde, geometries_.size(),
                                             "extrapolation noise std");
}

void ScviProblem::set_known_solution(BlockVector x) {
  if (!(x.layout() == *layout_)) throw DimensionError("known solution layout mismatch");
  solution_ = BlockVector(layout_, std::move(x.values()));
}

BlockVector ScviProblem::expected_map(const BlockVector& x) const {
  if (x.size() != dim()) throw DimensionError("point dimension mismatch");
  return BlockVector(layout_, map_->value(x.values()));
}

Vector ScviProblem::expected_block(std::size_t i, const BlockVector& x) const {
  return map_->block_value(layout_->offset(i), layout_->size(i), x.values());
}

bool ScviProblem::contains(const BlockVector& x, double tol) const {
  if (x.size() != dim()) return false;
  for (std::size_t i = 0; i < num_blocks(); ++i)
    if (!geometries_[i].set().contains(x.block(i), tol)) return false;
  return true;
}

BlockVector ScviProblem::project(const BlockVector& x) const {
  BlockVector out = BlockVector::zeros(layout_);
  for (std::size_t i = 0; i < num_blocks(); ++i)
    out.block(i) = scvi::project(geometries_[i].set(), x.block(i));
  return out;
}

BlockVector ScviProblem::sample_point(RandomStream& rng) const {
  BlockVector out = BlockVector::zeros(layout_);
  for (std::size_t i = 0; i < num_blocks(); ++i) out.block(i) = geometries_[i].set().sample(rng);
  return out;
}

BlockVector ScviProblem::center() const {
  BlockVector out = BlockVector::zeros(layout_);
  for (std::size_t i = 0; i < num_blocks(); ++i) out.block(i) = geometries_[i].set().center();
  return out;
}

Vector sample_block_map(const ScviProblem& problem, std::size_t block, const BlockVector& x,
                        RandomStream& stream, NoiseChannel channel) {
  Vector f = problem.expected_block(block, x);
  const double s = channel == NoiseChannel::Main ? problem.noise().coord_std[block]
                                                 : problem.noise().coord_std_tilde[block];
  if (s != 0.0)
    for (Index j = 0; j < f.size(); ++j) f[j] += s * stream.normal();
  if (!f.allFinite()) throw NonFiniteError("mapping returned non-finite values");
  return f;
}

BlockVector sample_map(const ScviProblem& problem, const BlockVector& x, RandomStream& stream,
                       NoiseChannel channel) {
  BlockVector f = problem.expected_map(x);
  const auto& stds = channel == NoiseChannel::Main ? problem.noise().coord_std
                                                   : problem.noise().coord_std_tilde;
  for (std::size_t i = 0; i < problem.num_blocks(); ++i) {
    auto b = f.block(i);
    if (stds[i] != 0.0)
      for (Index j = 0; j < b.size(); ++j) b[j] += stds[i] * stream.normal();
  }
  if (!f.values().allFinite()) throw NonFiniteError("mapping returned non-finite values");
  return f;
}

double operator_norm(const Matrix& m, NormKind from, NormKind to) {
  if (m.size() == 0) return 0.0;
  if (from == NormKind::L2 && to == NormKind::L2) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
  }
  if (from == NormKind::L1 && to == NormKind::L2) return m.colwise().norm().maxCoeff();
  if (from == NormKind::L2 && to == NormKind::L1) return m.rowwise().norm().maxCoeff();
  return m.cwiseAbs().maxCoeff();
}

namespace {

struct MapBounds {
  std::vector<double> map_bound;
  std::vector<double> lipschitz;
  double global_lipschitz = 0.0;
  double sup_norm2 = 0.0;  // sup over X of ‖F(x)‖₂
};

MapBounds map_bounds(const std::vector<BlockGeometry>& geoms, const BlockLayout& layout,
                     const Mapping& map) {
  const std::size_t d = geoms.size();
  MapBounds out;
  out.map_bound.resize(d);
  out.lipschitz.resize(d);
  if (const auto* affine = map.as_affine()) {
    const Matrix& a = affine->matrix();
    Vector c(layout.total());
    double r2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      c.segment(layout.offset(j), layout.size(j)) = geoms[j].set().center();
      const double rj = geoms[j].set().radius(NormKind::L2);
      r2 += rj * rj;
    }
    const Vector fc = affine->value(c);
    for (std::size_t i = 0; i < d; ++i) {
      const NormKind ni = geoms[i].norm_kind();
      const Index oi = layout.offset(i), si = layout.size(i);
      double ci = geoms[i].dual_norm(fc.segment(oi, si));
      for (std::size_t j = 0; j < d; ++j) {
        const NormKind nj = geoms[j].norm_kind();
        const Matrix aij = a.block(oi, layout.offset(j), si, layout.size(j));
        ci += operator_norm(aij, nj, ni) * geoms[j].set().radius(nj);
      }
      out.map_bound[i] = ci;
      out.lipschitz[i] = operator_norm(a.block(oi, oi, si, si), ni, ni);
    }
    out.global_lipschitz = operator_norm(a, NormKind::L2, NormKind::L2);
    out.sup_norm2 = fc.norm() + out.global_lipschitz * std::sqrt(r2);
    return out;
  }
  if (const auto* scaled = dynamic_cast<const ScaledMapping*>(&map)) {
    const MapBounds base = map_bounds(geoms, layout, scaled->base());
    const SineScaling& s = scaled->scaling();
    const double smax = s.max_value();
    const double amp = std::abs(s.amplitude);
    for (std::size_t i = 0; i < d; ++i) {
      const Vector vi = s.direction.segment(layout.offset(i), layout.size(i));
      out.map_bound[i] = smax * base.map_bound[i];
      out.lipschitz[i] = smax * base.lipschitz[i] + amp * geoms[i].dual_norm(vi) * base.map_bound[i];
    }
    out.global_lipschitz = smax * base.global_lipschitz + amp * s.direction.norm() * base.sup_norm2;
    out.sup_norm2 = smax * base.sup_norm2;
    return out;
  }
  throw DomainError("analytic constants need an affine or scaled-affine map");
}

}  // namespace

ProblemConstants analytic_constants(const std::vector<BlockGeometry>& geometries,
                                    const Mapping& map, const NoiseModel& noise,
                                    std::optional<double> modulus) {
  std::vector<Index> sizes;
  for (const auto& g : geometries) sizes.push_back(g.dim());
  const BlockLayout layout(sizes);
  const MapBounds mb = map_bounds(geometries, layout, map);
  ProblemConstants c;
  const std::size_t d = geometries.size();
  for (std::size_t i = 0; i < d; ++i) {
    const double root_n = std::sqrt(static_cast<double>(layout.size(i)));
    c.bound.push_back(geometries[i].bound());
    c.map_bound.push_back(mb.map_bound[i]);
    c.lipschitz.push_back(mb.lipschitz[i]);
    c.noise.push_back(noise.coord_std[i] * root_n);
    const auto& tilde = noise.coord_std_tilde.empty() ? noise.coord_std : noise.coord_std_tilde;
    c.noise_tilde.push_back(tilde[i] * root_n);
  }
  c.modulus = modulus;
  c.global_lipschitz = mb.global_lipschitz;
  c.method = "analytic";
  return c;
}

}  // namespace scvi
