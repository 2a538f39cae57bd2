#include "tenkit/coo.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "tenkit/errors.hpp"

namespace tenkit {

ModeOrder::ModeOrder(std::vector<std::size_t> perm) : perm_(std::move(perm)) {
  std::vector<bool> seen(perm_.size(), false);
  for (std::size_t m : perm_) {
    if (m >= perm_.size() || seen[m]) {
      throw ArgumentError("mode order is not a permutation of 0.." +
                          std::to_string(perm_.size() - 1));
    }
    seen[m] = true;
  }
}

ModeOrder ModeOrder::identity(std::size_t order) {
  std::vector<std::size_t> p(order);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return ModeOrder(std::move(p));
}

ModeOrder ModeOrder::for_mode(std::size_t mode, std::span<const std::size_t> dims) {
  if (mode >= dims.size()) {
    throw ArgumentError("mode " + std::to_string(mode) + " out of range for order " +
                        std::to_string(dims.size()));
  }
  std::vector<std::size_t> rest;
  for (std::size_t d = 0; d < dims.size(); ++d) {
    if (d != mode) rest.push_back(d);
  }
  std::stable_sort(rest.begin(), rest.end(),
                   [&](std::size_t a, std::size_t b) { return dims[a] < dims[b]; });
  std::vector<std::size_t> p{mode};
  p.insert(p.end(), rest.begin(), rest.end());
  return ModeOrder(std::move(p));
}

CooTensor::CooTensor(std::vector<std::size_t> dims)
    : dims_(std::move(dims)), inds_(dims_.size()) {}

CooTensor::CooTensor(std::vector<std::size_t> dims, std::vector<std::vector<index_t>> inds,
                     std::vector<value_t> values)
    : dims_(std::move(dims)), inds_(std::move(inds)), values_(std::move(values)) {
  if (inds_.size() != dims_.size()) {
    throw ArgumentError("index arrays do not match tensor order");
  }
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    if (inds_[d].size() != values_.size()) {
      throw ArgumentError("index array length differs from value count");
    }
    for (index_t i : inds_[d]) {
      if (i >= dims_[d]) {
        throw ArgumentError("index " + std::to_string(i) + " out of range in mode " +
                            std::to_string(d));
      }
    }
  }
}

void CooTensor::push_back(std::span<const index_t> idx, value_t v) {
  if (idx.size() != order()) {
    throw ArgumentError("entry arity " + std::to_string(idx.size()) + " != tensor order " +
                        std::to_string(order()));
  }
  for (std::size_t d = 0; d < idx.size(); ++d) {
    if (idx[d] >= dims_[d]) {
      throw ArgumentError("index " + std::to_string(idx[d]) + " out of range in mode " +
                          std::to_string(d));
    }
  }
  for (std::size_t d = 0; d < idx.size(); ++d) inds_[d].push_back(idx[d]);
  values_.push_back(v);
  sorted_under_.reset();
}

void CooTensor::reserve(std::size_t n) {
  for (auto& a : inds_) a.reserve(n);
  values_.reserve(n);
}

void CooTensor::scale(value_t alpha) {
  for (auto& v : values_) v *= alpha;
}

bool operator==(const CooTensor& a, const CooTensor& b) {
  return a.dims_ == b.dims_ && a.inds_ == b.inds_ && a.values_ == b.values_;
}

bool entry_less(const CooTensor& t, const ModeOrder& order, std::size_t a, std::size_t b) {
  for (std::size_t lvl = 0; lvl < order.size(); ++lvl) {
    const std::size_t m = order[lvl];
    const index_t ia = t.index(a, m);
    const index_t ib = t.index(b, m);
    if (ia != ib) return ia < ib;
  }
  return false;
}

namespace {

std::vector<std::size_t> sorted_permutation(const CooTensor& t, const ModeOrder& order) {
  std::vector<std::size_t> perm(t.nnz());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return entry_less(t, order, a, b);
  });
  return perm;
}

}  // namespace

CooTensor sort_by_mode_order(const CooTensor& t, const ModeOrder& order) {
  if (order.size() != t.order()) {
    throw ArgumentError("mode order length " + std::to_string(order.size()) +
                        " != tensor order " + std::to_string(t.order()));
  }
  const auto perm = sorted_permutation(t, order);
  CooTensor out(t.dims_);
  for (std::size_t d = 0; d < t.order(); ++d) {
    out.inds_[d].resize(perm.size());
    for (std::size_t x = 0; x < perm.size(); ++x) out.inds_[d][x] = t.inds_[d][perm[x]];
  }
  out.values_.resize(perm.size());
  for (std::size_t x = 0; x < perm.size(); ++x) out.values_[x] = t.values_[perm[x]];
  out.sorted_under_ = order;
  return out;
}

CooTensor canonicalize(const CooTensor& t) {
  const ModeOrder ident = ModeOrder::identity(t.order());
  const CooTensor sorted = sort_by_mode_order(t, ident);
  CooTensor out(t.dims_);
  out.reserve(sorted.nnz());
  std::vector<index_t> key(t.order());
  std::size_t x = 0;
  while (x < sorted.nnz()) {
    std::size_t y = x;
    value_t sum = 0.0;
    // entries equal under the identity order are adjacent after sorting
    while (y < sorted.nnz() && !entry_less(sorted, ident, x, y)) {
      sum += sorted.values_[y];
      ++y;
    }
    if (sum != 0.0) {
      for (std::size_t d = 0; d < t.order(); ++d) out.inds_[d].push_back(sorted.inds_[d][x]);
      out.values_.push_back(sum);
    }
    x = y;
  }
  out.sorted_under_ = ident;
  return out;
}

}  // namespace tenkit
