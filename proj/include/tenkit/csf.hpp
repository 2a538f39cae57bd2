#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "tenkit/coo.hpp"

namespace tenkit {

/// Compressed sparse fiber tree. Level 0 holds the slices, level N-2 the
/// fibers, and the leaves are the nonzeros. Only nonempty nodes are stored.
///
/// For each non-leaf level d, `idx[d][n]` is the mode_order[d] index of node n
/// and its children occupy `[ptr[d][n], ptr[d][n+1])` of level d+1 (the
/// leaves when d == N-2). Children indices strictly increase within a parent,
/// except in fiber-split tensors where a split fiber repeats its index.
struct CsfTensor {
  std::vector<std::size_t> dims;  ///< original (unpermuted) dims
  ModeOrder mode_order;
  std::vector<std::vector<index_t>> ptr;
  std::vector<std::vector<index_t>> idx;
  std::vector<index_t> leaf_idx;
  std::vector<value_t> values;
  bool fiber_split = false;

  std::size_t order() const noexcept { return dims.size(); }
  std::size_t nnz() const noexcept { return values.size(); }
  /// Node count at `level`; level order()-1 is the nonzero count.
  std::size_t level_size(std::size_t level) const {
    return level + 1 == order() ? values.size() : idx[level].size();
  }
  std::size_t slices() const { return level_size(0); }
  std::size_t fibers() const { return level_size(order() - 2); }

  /// Range of level-`to` nodes below node `node` of level `from` (from <= to).
  std::pair<std::size_t, std::size_t> descend(std::size_t from, std::size_t node,
                                              std::size_t to) const;
  std::pair<std::size_t, std::size_t> slice_fibers(std::size_t slice) const {
    return descend(0, slice, order() - 2);
  }
  std::pair<std::size_t, std::size_t> fiber_nonzeros(std::size_t fiber) const {
    const auto& p = ptr[order() - 2];
    return {p[fiber], p[fiber + 1]};
  }
  std::vector<std::size_t> permuted_dims() const;
};

/// Builds the tree from a canonical tensor. Order must be >= 2.
CsfTensor build_csf(const CooTensor& t, const ModeOrder& order);

/// Entries of the tree in tree order, as a COO tensor sorted under mode_order.
CooTensor flatten(const CsfTensor& t);

/// Checks pointer monotonicity, no empty children, index ranges and sibling
/// ordering. Throws ArgumentError describing the first violation.
void validate(const CsfTensor& t);

}  // namespace tenkit
