#include "scvi/block_vector.hpp"

#include "scvi/error.hpp"

namespace scvi {

BlockLayout::BlockLayout(const std::vector<Index>& sizes) {
  if (sizes.empty()) throw DimensionError("block layout needs at least one block");
  offsets_.reserve(sizes.size() + 1);
  for (Index n : sizes) {
    if (n < 1) throw DimensionError("block sizes must be positive");
    offsets_.push_back(offsets_.back() + n);
  }
}

BlockLayout BlockLayout::uniform(std::size_t blocks, Index size) {
  return BlockLayout(std::vector<Index>(blocks, size));
}

std::vector<Index> BlockLayout::sizes() const {
  std::vector<Index> out(num_blocks());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = size(i);
  return out;
}

BlockVector::BlockVector(LayoutPtr layout, Vector values)
    : layout_(std::move(layout)), values_(std::move(values)) {
  if (!layout_) throw DimensionError("block vector without layout");
  if (values_.size() != layout_->total())
    throw DimensionError("block vector length " + std::to_string(values_.size()) +
                         " does not match layout total " + std::to_string(layout_->total()));
}

BlockVector BlockVector::zeros(LayoutPtr layout) {
  Vector v = Vector::Zero(layout->total());
  return BlockVector(std::move(layout), std::move(v));
}

bool BlockVector::operator==(const BlockVector& other) const {
  if (!(*layout_ == *other.layout_)) return false;
  return values_.size() == other.values_.size() && (values_.array() == other.values_.array()).all();
}

}  // namespace scvi
