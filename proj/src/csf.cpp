#include "tenkit/csf.hpp"

#include <string>

#include "tenkit/errors.hpp"

namespace tenkit {

std::pair<std::size_t, std::size_t> CsfTensor::descend(std::size_t from, std::size_t node,
                                                       std::size_t to) const {
  std::size_t b = node;
  std::size_t e = node + 1;
  for (std::size_t d = from; d < to; ++d) {
    b = ptr[d][b];
    e = ptr[d][e];
  }
  return {b, e};
}

std::vector<std::size_t> CsfTensor::permuted_dims() const {
  std::vector<std::size_t> out(order());
  for (std::size_t l = 0; l < order(); ++l) out[l] = dims[mode_order[l]];
  return out;
}

CsfTensor build_csf(const CooTensor& t, const ModeOrder& order) {
  if (t.order() < 2) throw ArgumentError("CSF needs an order >= 2 tensor");
  if (order.size() != t.order()) throw ArgumentError("mode order length != tensor order");
  const CooTensor s = (t.sorted_under() && *t.sorted_under() == order)
                          ? t
                          : sort_by_mode_order(t, order);
  const std::size_t n = t.order();
  CsfTensor csf;
  csf.dims = t.dims();
  csf.mode_order = order;
  csf.ptr.assign(n - 1, {});
  csf.idx.assign(n - 1, {});
  csf.leaf_idx.reserve(s.nnz());
  csf.values.reserve(s.nnz());

  for (std::size_t x = 0; x < s.nnz(); ++x) {
    // first level at which this entry differs from the previous one
    std::size_t split = 0;
    if (x > 0) {
      while (split < n - 1 && s.index(x, order[split]) == s.index(x - 1, order[split])) {
        ++split;
      }
    }
    for (std::size_t d = split; d < n - 1; ++d) {
      csf.ptr[d].push_back(static_cast<index_t>(d + 1 < n - 1 ? csf.idx[d + 1].size()
                                                              : csf.values.size()));
      csf.idx[d].push_back(s.index(x, order[d]));
    }
    csf.leaf_idx.push_back(s.index(x, order[n - 1]));
    csf.values.push_back(s.value(x));
  }
  for (std::size_t d = 0; d < n - 1; ++d) {
    csf.ptr[d].push_back(static_cast<index_t>(d + 1 < n - 1 ? csf.idx[d + 1].size()
                                                            : csf.values.size()));
  }
  return csf;
}

CooTensor flatten(const CsfTensor& t) {
  const std::size_t n = t.order();
  std::vector<std::vector<index_t>> inds(n, std::vector<index_t>(t.nnz()));
  // walk each level and paint its index over the leaf range it covers
  for (std::size_t d = 0; d + 1 < n; ++d) {
    for (std::size_t node = 0; node < t.level_size(d); ++node) {
      const auto [b, e] = t.descend(d, node, n - 1);
      for (std::size_t x = b; x < e; ++x) inds[t.mode_order[d]][x] = t.idx[d][node];
    }
  }
  inds[t.mode_order.leaf()] = t.leaf_idx;
  CooTensor out(t.dims, std::move(inds), t.values);
  return sort_by_mode_order(out, t.mode_order);
}

void validate(const CsfTensor& t) {
  const std::size_t n = t.order();
  auto fail = [](const std::string& m) { throw ArgumentError("invalid CSF: " + m); };
  if (t.ptr.size() != n - 1 || t.idx.size() != n - 1) fail("level count");
  if (t.leaf_idx.size() != t.values.size()) fail("leaf/value length");
  for (std::size_t d = 0; d + 1 < n; ++d) {
    const auto& p = t.ptr[d];
    if (p.size() != t.idx[d].size() + 1) fail("ptr length at level " + std::to_string(d));
    if (p.front() != 0 || p.back() != t.level_size(d + 1)) {
      fail("ptr bounds at level " + std::to_string(d));
    }
    if (d == 0 && t.idx[0].size() != 0) {
      for (std::size_t s = 1; s < t.idx[0].size(); ++s) {
        if (t.idx[0][s] <= t.idx[0][s - 1]) fail("slice indices not increasing");
      }
    }
    for (std::size_t node = 0; node < t.idx[d].size(); ++node) {
      if (t.idx[d][node] >= t.dims[t.mode_order[d]]) fail("index out of range");
      if (p[node + 1] <= p[node]) fail("empty node at level " + std::to_string(d));
      const auto& child = d + 2 < n ? t.idx[d + 1] : t.leaf_idx;
      for (std::size_t c = p[node] + 1; c < p[node + 1]; ++c) {
        const bool split_level = t.fiber_split && d + 3 == n;
        if (split_level ? child[c] < child[c - 1] : child[c] <= child[c - 1]) {
          fail("children out of order at level " + std::to_string(d + 1));
        }
      }
    }
  }
  for (index_t k : t.leaf_idx) {
    if (k >= t.dims[t.mode_order.leaf()]) fail("leaf index out of range");
  }
}

}  // namespace tenkit
