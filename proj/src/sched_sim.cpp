#include "tenkit/sched_sim.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <utility>

#include "tenkit/errors.hpp"

namespace tenkit {

void MachineModel::validate() const {
  if (num_sms == 0 || warps_per_block == 0 || warp_size == 0 || blocks_per_sm == 0) {
    throw ArgumentError("machine model fields must all be >= 1");
  }
}

namespace {

using Slot = std::pair<std::uint64_t, std::size_t>;  // (free at, id)
using MinHeap = std::priority_queue<Slot, std::vector<Slot>, std::greater<>>;

}  // namespace

SimReport simulate(const BlockSchedule& schedule, const CsfTensor& t, const MachineModel& m) {
  m.validate();
  check_covers(schedule, t);
  SimReport rep;
  rep.per_block_cycles.reserve(schedule.units.size());

  for (const auto& u : schedule.units) {
    MinHeap warps;
    for (std::size_t w = 0; w < m.warps_per_block; ++w) warps.push({0, w});
    std::uint64_t block = 0;
    for (std::size_t f = u.fiber_begin; f < u.fiber_end; ++f) {
      const auto [b, e] = t.fiber_nonzeros(f);
      const std::uint64_t cost = (e - b + m.warp_size - 1) / m.warp_size;
      auto [busy, id] = warps.top();
      warps.pop();
      busy += cost;
      block = std::max(block, busy);
      warps.push({busy, id});
      rep.total_work_cycles += cost;
    }
    rep.per_block_cycles.push_back(block);
  }

  const std::size_t slots = m.num_sms * m.blocks_per_sm;
  MinHeap free_slots;
  for (std::size_t s = 0; s < slots; ++s) free_slots.push({0, s});
  // busy intervals per SM, in placement order
  std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> sm_busy(m.num_sms);
  for (std::uint64_t cycles : rep.per_block_cycles) {
    auto [start, slot] = free_slots.top();
    free_slots.pop();
    const std::uint64_t end = start + cycles;
    rep.makespan_cycles = std::max(rep.makespan_cycles, end);
    if (cycles > 0) sm_busy[slot / m.blocks_per_sm].push_back({start, end});
    free_slots.push({end, slot});
  }

  if (rep.makespan_cycles == 0) return rep;
  std::uint64_t active = 0;  // SM-cycles with at least one resident busy block
  for (auto& iv : sm_busy) {
    std::sort(iv.begin(), iv.end());
    std::uint64_t cur_b = 0, cur_e = 0;
    bool open = false;
    for (const auto& [b, e] : iv) {
      if (open && b <= cur_e) {
        cur_e = std::max(cur_e, e);
      } else {
        if (open) active += cur_e - cur_b;
        cur_b = b;
        cur_e = e;
        open = true;
      }
    }
    if (open) active += cur_e - cur_b;
  }
  rep.sm_efficiency_proxy =
      static_cast<double>(active) / static_cast<double>(m.num_sms * rep.makespan_cycles);
  rep.occupancy_proxy = static_cast<double>(rep.total_work_cycles) /
                        static_cast<double>(active) /
                        static_cast<double>(m.warps_per_block * m.blocks_per_sm);
  return rep;
}

std::vector<SweepRow> sweep_split(const CsfTensor& t, const std::vector<std::size_t>& thresholds,
                                  const MachineModel& m, const SplitConfig& cfg) {
  if (thresholds.empty()) throw ArgumentError("threshold list is empty");
  std::vector<SweepRow> rows;
  for (std::size_t tau : thresholds) {
    SplitConfig c = cfg;
    const CsfTensor split = [&] {
      if (tau == kNoSplit) return t;
      c.fiber_threshold = tau;
      return split_fibers(t, c);
    }();
    const auto schedule = assign_slice_blocks(split, c);
    rows.push_back({tau, simulate(schedule, split, m), imbalance_metrics(split)});
  }
  return rows;
}

}  // namespace tenkit
