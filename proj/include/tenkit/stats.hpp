#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tenkit/coo.hpp"

namespace tenkit {

/// Population summary of a list of group sizes.
struct Distribution {
  std::size_t count = 0;
  std::size_t max = 0;
  double mean = 0.0;
  double stddev = 0.0;  ///< population standard deviation; 0 when count == 0
};

Distribution summarize(std::span<const std::size_t> sizes);

/// Slice and fiber populations of a tensor under one mode order. Only
/// nonempty slices (entries sharing the root index) and fibers (entries
/// sharing all but the leaf index) are counted.
struct ModeOrderStats {
  ModeOrder mode_order;
  std::size_t slices = 0;
  std::size_t fibers = 0;
  Distribution nnz_per_slice;
  Distribution nnz_per_fiber;
};

struct TensorStats {
  std::size_t order = 0;
  std::vector<std::size_t> dims;
  std::size_t nnz = 0;
  double density = 0.0;
  ModeOrderStats per_order;
};

/// Expects a canonical tensor (no duplicate coordinates).
TensorStats compute_stats(const CooTensor& t, const ModeOrder& order);

}  // namespace tenkit
