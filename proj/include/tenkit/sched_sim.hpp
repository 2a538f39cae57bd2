#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "tenkit/balance.hpp"
#include "tenkit/csf.hpp"

namespace tenkit {

/// Idealised GPU: num_sms * blocks_per_sm block slots, each block runs
/// warps_per_block warps of warp_size lanes.
struct MachineModel {
  std::size_t num_sms = 56;
  std::size_t warps_per_block = 16;
  std::size_t warp_size = 32;
  std::size_t blocks_per_sm = 1;

  void validate() const;
};

/// Model output. The efficiency and occupancy figures are proxies computed
/// from the cost model, not hardware counters.
struct SimReport {
  std::uint64_t makespan_cycles = 0;
  std::vector<std::uint64_t> per_block_cycles;
  double sm_efficiency_proxy = 0.0;  ///< SM-cycles with >= 1 busy warp / (num_sms * makespan)
  double occupancy_proxy = 0.0;      ///< busy warps per active SM-cycle / resident warp capacity
  std::uint64_t total_work_cycles = 0;
};

/// Cost model: a warp spends ceil(n / warp_size) cycles on a fiber segment of
/// n nonzeros. Inside a block, the next idle warp (lowest id on ties) takes
/// the next fiber of the unit; block time is the busiest warp's total. Blocks
/// are placed in schedule order on the earliest free slot (lowest slot id on
/// ties). Fiber combines and slice writes cost nothing.
SimReport simulate(const BlockSchedule& schedule, const CsfTensor& t, const MachineModel& m);

/// Threshold value meaning "do not split".
inline constexpr std::size_t kNoSplit = std::numeric_limits<std::size_t>::max();

struct SweepRow {
  std::size_t threshold = kNoSplit;
  SimReport report;
  ImbalanceMetrics metrics;
};

/// For each threshold: split fibers (unless kNoSplit), bin slices into
/// blocks with `cfg.block_size`, and simulate. `cfg.fiber_threshold` is ignored.
std::vector<SweepRow> sweep_split(const CsfTensor& t, const std::vector<std::size_t>& thresholds,
                                  const MachineModel& m, const SplitConfig& cfg = {});

}  // namespace tenkit
