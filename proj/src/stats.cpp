#include "tenkit/stats.hpp"

#include <algorithm>
#include <cmath>

namespace tenkit {

Distribution summarize(std::span<const std::size_t> sizes) {
  Distribution d;
  d.count = sizes.size();
  if (sizes.empty()) return d;
  double sum = 0.0;
  for (std::size_t s : sizes) {
    sum += static_cast<double>(s);
    d.max = std::max(d.max, s);
  }
  d.mean = sum / static_cast<double>(sizes.size());
  double ss = 0.0;
  for (std::size_t s : sizes) {
    const double dev = static_cast<double>(s) - d.mean;
    ss += dev * dev;
  }
  d.stddev = std::sqrt(ss / static_cast<double>(sizes.size()));
  return d;
}

TensorStats compute_stats(const CooTensor& t, const ModeOrder& order) {
  TensorStats st;
  st.order = t.order();
  st.dims = t.dims();
  st.nnz = t.nnz();
  double cells = 1.0;
  for (std::size_t d : t.dims()) cells *= static_cast<double>(d);
  st.density = cells > 0 ? static_cast<double>(t.nnz()) / cells : 0.0;
  st.per_order.mode_order = order;
  if (t.empty()) return st;

  const CooTensor s = (t.sorted_under() && *t.sorted_under() == order)
                          ? t
                          : sort_by_mode_order(t, order);
  const std::size_t n = t.order();
  std::vector<std::size_t> slice_sizes, fiber_sizes;
  auto same_prefix = [&](std::size_t a, std::size_t b, std::size_t depth) {
    for (std::size_t l = 0; l < depth; ++l) {
      if (s.index(a, order[l]) != s.index(b, order[l])) return false;
    }
    return true;
  };
  for (std::size_t x = 0; x < s.nnz(); ++x) {
    if (x == 0 || !same_prefix(x - 1, x, 1)) slice_sizes.push_back(0);
    if (x == 0 || !same_prefix(x - 1, x, n - 1)) fiber_sizes.push_back(0);
    ++slice_sizes.back();
    ++fiber_sizes.back();
  }
  st.per_order.slices = slice_sizes.size();
  st.per_order.fibers = fiber_sizes.size();
  st.per_order.nnz_per_slice = summarize(slice_sizes);
  st.per_order.nnz_per_fiber = summarize(fiber_sizes);
  return st;
}

}  // namespace tenkit
