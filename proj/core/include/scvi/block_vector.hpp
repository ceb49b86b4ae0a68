#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace scvi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

class BlockLayout {
 public:
  BlockLayout() = default;
  explicit BlockLayout(const std::vector<Index>& sizes);
  static BlockLayout uniform(std::size_t blocks, Index size);

  std::size_t num_blocks() const { return offsets_.size() - 1; }
  Index size(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
  Index offset(std::size_t i) const { return offsets_[i]; }
  Index total() const { return offsets_.back(); }
  std::vector<Index> sizes() const;

  bool operator==(const BlockLayout&) const = default;

 private:
  std::vector<Index> offsets_{0};
};

using LayoutPtr = std::shared_ptr<const BlockLayout>;

class BlockVector {
 public:
  BlockVector() = default;
  BlockVector(LayoutPtr layout, Vector values);
  static BlockVector zeros(LayoutPtr layout);

  const BlockLayout& layout() const { return *layout_; }
  const LayoutPtr& layout_ptr() const { return layout_; }
  std::size_t num_blocks() const { return layout_->num_blocks(); }
  Index size() const { return values_.size(); }

  auto block(std::size_t i) { return values_.segment(layout_->offset(i), layout_->size(i)); }
  auto block(std::size_t i) const {
    return values_.segment(layout_->offset(i), layout_->size(i));
  }

  Vector& values() { return values_; }
  const Vector& values() const { return values_; }

  bool operator==(const BlockVector& other) const;

 private:
  LayoutPtr layout_;
  Vector values_;
};

}  // namespace scvi
