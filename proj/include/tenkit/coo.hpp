#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tenkit {

using index_t = std::uint32_t;
using value_t = double;

/// A permutation of the modes 0..N-1. Position 0 is the slice (root) mode,
/// the last position is the leaf mode.
class ModeOrder {
 public:
  ModeOrder() = default;
  /// Throws ArgumentError unless `perm` is a permutation of 0..perm.size()-1.
  explicit ModeOrder(std::vector<std::size_t> perm);

  static ModeOrder identity(std::size_t order);
  /// Root mode first, remaining modes by ascending dimension (ties by mode id).
  static ModeOrder for_mode(std::size_t mode, std::span<const std::size_t> dims);

  std::size_t size() const noexcept { return perm_.size(); }
  std::size_t operator[](std::size_t level) const { return perm_[level]; }
  std::size_t root() const { return perm_.front(); }
  std::size_t leaf() const { return perm_.back(); }
  const std::vector<std::size_t>& levels() const noexcept { return perm_; }

  friend bool operator==(const ModeOrder&, const ModeOrder&) = default;

 private:
  std::vector<std::size_t> perm_;
};

/// Coordinate-format sparse tensor. Indices are 0-based and stored mode-major:
/// `inds[d][x]` is the mode-d index of entry x.
class CooTensor {
 public:
  CooTensor() = default;
  explicit CooTensor(std::vector<std::size_t> dims);
  CooTensor(std::vector<std::size_t> dims, std::vector<std::vector<index_t>> inds,
            std::vector<value_t> values);

  std::size_t order() const noexcept { return dims_.size(); }
  std::size_t nnz() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t dim(std::size_t mode) const { return dims_[mode]; }

  index_t index(std::size_t entry, std::size_t mode) const { return inds_[mode][entry]; }
  std::span<const index_t> mode_indices(std::size_t mode) const { return inds_[mode]; }
  value_t value(std::size_t entry) const { return values_[entry]; }
  std::span<const value_t> values() const noexcept { return values_; }

  /// Appends one entry; grows no dims, throws ArgumentError if out of range.
  void push_back(std::span<const index_t> idx, value_t v);
  void reserve(std::size_t n);
  void scale(value_t alpha);

  const std::optional<ModeOrder>& sorted_under() const noexcept { return sorted_under_; }

  /// Exact equality of dims, entry order, indices and values.
  friend bool operator==(const CooTensor& a, const CooTensor& b);

 private:
  friend CooTensor sort_by_mode_order(const CooTensor&, const ModeOrder&);
  friend CooTensor canonicalize(const CooTensor&);

  std::vector<std::size_t> dims_;
  std::vector<std::vector<index_t>> inds_;
  std::vector<value_t> values_;
  std::optional<ModeOrder> sorted_under_;
};

/// Merges duplicate coordinates by summation, drops exact zeros, and sorts
/// under the identity mode order.
CooTensor canonicalize(const CooTensor& t);

/// Stable lexicographic sort of the entries by (idx[order[0]], ..., idx[order[N-1]]).
CooTensor sort_by_mode_order(const CooTensor& t, const ModeOrder& order);

/// Lexicographic comparison of entries a and b of `t` under `order`.
bool entry_less(const CooTensor& t, const ModeOrder& order, std::size_t a, std::size_t b);

}  // namespace tenkit
