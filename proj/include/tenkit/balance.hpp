#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tenkit/csf.hpp"
#include "tenkit/stats.hpp"

namespace tenkit {

struct SplitConfig {
  std::size_t fiber_threshold = 128;
  std::size_t block_size = 512;  ///< threads per block
  std::size_t warp_size = 32;

  /// Throws ArgumentError on a zero field or a warp size that does not divide the block size.
  void validate() const;
};

/// One scheduled unit: fibers [fiber_begin, fiber_end) of a slice, processed
/// by one thread block. Fibers are level N-2 nodes.
struct ScheduleUnit {
  std::size_t block_id = 0;
  std::size_t slice = 0;  ///< slice position in the tree, not its index value
  std::size_t fiber_begin = 0;
  std::size_t fiber_end = 0;
};

struct BlockSchedule {
  std::vector<ScheduleUnit> units;
  /// Blocks granted per slice position (>= 1). A slice gets at most this
  /// many units; fewer when a single fiber outweighs the group target.
  std::vector<std::size_t> multiplicity;

  std::size_t blocks() const noexcept { return units.size(); }
};

/// Cuts every fiber with more than `fiber_threshold` nonzeros into
/// ceil(n / threshold) segments of `threshold` nonzeros plus a shorter tail.
/// Segments repeat the fiber's index; the result is flagged fiber_split when
/// at least one fiber was cut.
CsfTensor split_fibers(const CsfTensor& t, const SplitConfig& cfg);

/// Gives a slice of m nonzeros max(1, ceil(m / block_size)) units; its
/// fibers are cut into that many contiguous groups, each closed once its
/// nonzero count reaches ceil(m / multiplicity).
BlockSchedule assign_slice_blocks(const CsfTensor& t, const SplitConfig& cfg);

/// One block per slice, covering all of its fibers.
BlockSchedule one_block_per_slice(const CsfTensor& t);

/// Throws ArgumentError unless every fiber of `t` appears in exactly one unit.
void check_covers(const BlockSchedule& schedule, const CsfTensor& t);

struct ImbalanceMetrics {
  std::size_t slices = 0;
  std::size_t fibers = 0;
  std::size_t nnz = 0;
  Distribution nnz_per_slice;
  Distribution nnz_per_fiber;
};

/// Fiber statistics are taken over stored fibers, i.e. segments after a split.
ImbalanceMetrics imbalance_metrics(const CsfTensor& t);

void to_json(nlohmann::json& j, const ImbalanceMetrics& m);

}  // namespace tenkit
