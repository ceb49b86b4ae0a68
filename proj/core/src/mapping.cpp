#include "scvi/mapping.hpp"

#include <cmath>

#include "scvi/error.hpp"

namespace scvi {

Vector Mapping::block_value(Index offset, Index size, const Vector& x) const {
  return value(x).segment(offset, size);
}

Vector Mapping::jacobian_transpose_apply(const Vector& x, const Vector& v) const {
  const Index n = dim();
  Vector out(n);
  Vector xp = x;
  for (Index j = 0; j < n; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + h;
    const Vector fp = value(xp);
    xp[j] = x[j] - h;
    const Vector fm = value(xp);
    xp[j] = x[j];
    out[j] = v.dot(fp - fm) / (2.0 * h);
  }
  return out;
}

AffineMapping::AffineMapping(Matrix matrix, Vector offset)
    : matrix_(std::move(matrix)), offset_(std::move(offset)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() != offset_.size())
    throw DimensionError("affine map needs a square matrix matching the offset");
  if (!matrix_.allFinite() || !offset_.allFinite())
    throw NonFiniteError("affine map data must be finite");
}

Vector AffineMapping::value(const Vector& x) const { return matrix_ * x + offset_; }

Vector AffineMapping::block_value(Index offset, Index size, const Vector& x) const {
  return matrix_.middleRows(offset, size) * x + offset_.segment(offset, size);
}

Vector AffineMapping::jacobian_transpose_apply(const Vector&, const Vector& v) const {
  return matrix_.transpose() * v;
}

nlohmann::json AffineMapping::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (Index r = 0; r < matrix_.rows(); ++r) {
    std::vector<double> row(matrix_.cols());
    for (Index c = 0; c < matrix_.cols(); ++c) row[c] = matrix_(r, c);
    rows.push_back(row);
  }
  return {{"type", "affine"},
          {"matrix", rows},
          {"offset", std::vector<double>(offset_.data(), offset_.data() + offset_.size())}};
}

SineScaling SineScaling::standard(Index n) { return SineScaling{1.5, 1.0, Vector::Ones(n)}; }

double SineScaling::value(const Vector& x) const {
  return offset + amplitude * std::sin(direction.dot(x));
}

Vector SineScaling::gradient(const Vector& x) const {
  return amplitude * std::cos(direction.dot(x)) * direction;
}

ScaledMapping::ScaledMapping(MappingPtr base, SineScaling scaling)
    : base_(std::move(base)), scaling_(std::move(scaling)) {
  if (!base_) throw DomainError("scaled map needs a base map");
  if (scaling_.direction.size() != base_->dim())
    throw DimensionError("scaling direction length mismatch");
  if (!(scaling_.min_value() > 0.0))
    throw DomainError("scaling must stay bounded away from zero");
}

Vector ScaledMapping::value(const Vector& x) const { return scaling_.value(x) * base_->value(x); }

Vector ScaledMapping::block_value(Index offset, Index size, const Vector& x) const {
  return scaling_.value(x) * base_->block_value(offset, size, x);
}

Vector ScaledMapping::jacobian_transpose_apply(const Vector& x, const Vector& v) const {
  // J = s·J_base + F_base ∇sᵀ
  return scaling_.value(x) * base_->jacobian_transpose_apply(x, v) +
         v.dot(base_->value(x)) * scaling_.gradient(x);
}

nlohmann::json ScaledMapping::to_json() const {
  const Vector& d = scaling_.direction;
  return {{"type", "scaled"},
          {"base", base_->to_json()},
          {"scaling",
           {{"offset", scaling_.offset},
            {"amplitude", scaling_.amplitude},
            {"direction", std::vector<double>(d.data(), d.data() + d.size())}}}};
}

namespace {

Vector vector_from_json(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

}  // namespace

MappingPtr mapping_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "affine") {
    const auto& rows = j.at("matrix");
    const Index n = static_cast<Index>(rows.size());
    Matrix m(n, n);
    for (Index r = 0; r < n; ++r) {
      const auto row = rows.at(r).get<std::vector<double>>();
      if (static_cast<Index>(row.size()) != n) throw DimensionError("affine matrix must be square");
      for (Index c = 0; c < n; ++c) m(r, c) = row[c];
    }
    return std::make_shared<AffineMapping>(std::move(m), vector_from_json(j.at("offset")));
  }
  if (type == "scaled") {
    const auto& s = j.at("scaling");
    SineScaling scaling{s.at("offset").get<double>(), s.at("amplitude").get<double>(),
                        vector_from_json(s.at("direction"))};
    return std::make_shared<ScaledMapping>(mapping_from_json(j.at("base")), std::move(scaling));
  }
  throw DomainError("unknown mapping type '" + type + "'");
}

}  // namespace scvi
