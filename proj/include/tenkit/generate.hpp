#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tenkit/coo.hpp"

namespace tenkit {

struct GenOptions {
  std::vector<std::size_t> dims;
  std::size_t nnz = 0;
  double skew = 0.0;  ///< Zipf exponent; 0 is uniform
  std::uint64_t seed = 0;
};

/// Synthetic power-law tensor with exactly `nnz` distinct coordinates.
/// Mode 0 (slice) and mode 1 (fiber) indices are drawn with P(i) ~ 1/(i+1)^skew,
/// so low indices are heavy; the other modes are uniform. Values are in (0, 1].
/// The result is canonical and depends only on the options.
/// Throws ArgumentError if nnz exceeds the number of cells, or if rejection
/// sampling cannot find enough distinct coordinates.
CooTensor generate_powerlaw(const GenOptions& opts);

}  // namespace tenkit
