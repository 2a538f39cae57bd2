#include <doctest.h>

#include <random>

#include "tenkit/balance.hpp"
#include "tenkit/errors.hpp"
#include "tenkit/generate.hpp"
#include "tenkit/sched_sim.hpp"
#include "test_support.hpp"

using namespace tenkit;
using namespace tenkit::testing;

namespace {

/// Tensor whose slices hold fibers of the given nonzero counts.
CsfTensor layout(const std::vector<std::vector<std::size_t>>& slices) {
  std::size_t max_f = 0, max_n = 0;
  for (const auto& s : slices) {
    max_f = std::max(max_f, s.size());
    for (auto n : s) max_n = std::max(max_n, n);
  }
  CooTensor t({slices.size(), max_f, max_n});
  for (index_t i = 0; i < slices.size(); ++i) {
    for (index_t j = 0; j < slices[i].size(); ++j) {
      for (index_t k = 0; k < slices[i][j]; ++k) t.push_back(std::vector<index_t>{i, j, k}, 1.0);
    }
  }
  return build_csf(canonicalize(t), ModeOrder::identity(3));
}

}  // namespace

TEST_CASE("simulate: single ceil") {
  const auto csf = layout({{3}});
  const auto r = simulate(one_block_per_slice(csf), csf, {1, 1, 32, 1});
  CHECK(r.makespan_cycles == 1);
  CHECK(r.total_work_cycles == 1);
}

TEST_CASE("simulate: one warp, one block serialises all work") {
  std::mt19937_64 rng(14);
  const auto csf = build_csf(canonicalize(random_tensor(rng, {1, 20, 40}, 300)),
                             ModeOrder::identity(3));
  const auto r = simulate(one_block_per_slice(csf), csf, {1, 1, 4, 1});
  CHECK(r.makespan_cycles == r.total_work_cycles);
  CHECK(r.sm_efficiency_proxy == 1.0);
  CHECK(r.occupancy_proxy == 1.0);
}

TEST_CASE("simulate: load-balancing walkthrough gives 4, 3, 2 cycles") {
  // One nonzero per cycle (warp_size 1), two warps per block, two block slots.
  // Slice 0: fibers (1, 1). Slice 1: fibers (4, 1, 1).
  // Unsplit: slice 1's heavy fiber keeps one warp busy 4 cycles.
  // Fiber split at 2: warps take 2, 2, then 1, 1 -> 3 cycles.
  // Binning with 4-thread blocks gives slice 1 two units, (2, 2) and (1, 1),
  // which pack behind slice 0 on the second slot -> 2 cycles.
  const auto csf = layout({{1, 1}, {4, 1, 1}});
  const MachineModel m{2, 2, 1, 1};
  CHECK(simulate(one_block_per_slice(csf), csf, m).makespan_cycles == 4);
  const auto split = split_fibers(csf, {2, 8, 1});
  const auto fiber_only = assign_slice_blocks(split, {2, 8, 1});
  CHECK(fiber_only.blocks() == 2);
  CHECK(simulate(fiber_only, split, m).makespan_cycles == 3);
  const auto both = assign_slice_blocks(split, {2, 4, 1});
  CHECK(both.multiplicity[1] == 2);
  const auto r = simulate(both, split, m);
  CHECK(r.makespan_cycles == 2);
  CHECK(r.sm_efficiency_proxy == 1.0);
}

TEST_CASE("simulate: uniform tensor with one block per SM is fully efficient") {
  std::vector<std::vector<std::size_t>> slices(8, std::vector<std::size_t>(4, 32));
  const auto csf = layout(slices);
  const auto r = simulate(one_block_per_slice(csf), csf, {8, 4, 32, 1});
  CHECK(r.makespan_cycles == 1);
  CHECK(r.sm_efficiency_proxy == 1.0);
  CHECK(r.occupancy_proxy == 1.0);
}

TEST_CASE("simulate: mismatched schedule is rejected") {
  const auto a = layout({{1, 1}, {2}});
  const auto b = layout({{1}});
  CHECK_THROWS_AS(simulate(one_block_per_slice(a), b, {}), ArgumentError);
}

TEST_CASE("simulate: lower bounds and proxy ranges on random tensors") {
  std::mt19937_64 rng(15);
  for (std::size_t rep = 0; rep < 30; ++rep) {
    const auto t = canonicalize(random_tensor(rng, random_dims(rng, 3, 30), 500));
    const auto csf = build_csf(t, ModeOrder::identity(3));
    const MachineModel m{1 + rep % 4, 1 + rep % 3, 1 + rep % 5, 1 + rep % 2};
    const SplitConfig cfg{1 + rep % 7, m.warp_size * 4, m.warp_size};
    const auto split = split_fibers(csf, cfg);
    const auto sch = assign_slice_blocks(split, cfg);
    const auto r = simulate(sch, split, m);
    const std::uint64_t lanes = m.num_sms * m.blocks_per_sm * m.warps_per_block;
    CHECK(r.makespan_cycles >= (r.total_work_cycles + lanes - 1) / lanes);
    std::uint64_t max_seg = 0;
    for (std::size_t f = 0; f < split.fibers(); ++f) {
      const auto [b, e] = split.fiber_nonzeros(f);
      max_seg = std::max<std::uint64_t>(max_seg, (e - b + m.warp_size - 1) / m.warp_size);
    }
    CHECK(r.makespan_cycles >= max_seg);
    CHECK(r.sm_efficiency_proxy > 0.0);
    CHECK(r.sm_efficiency_proxy <= 1.0);
    CHECK(r.occupancy_proxy > 0.0);
    CHECK(r.occupancy_proxy <= 1.0);
    // splitting never lowers the work, only the critical path
    const auto unsplit = simulate(one_block_per_slice(csf), csf, m);
    CHECK(r.total_work_cycles >= unsplit.total_work_cycles);
  }
}

TEST_CASE("sweep_split") {
  const MachineModel m{4, 4, 8, 1};
  SUBCASE("no-split threshold reproduces plain simulate") {
    std::mt19937_64 rng(16);
    const auto csf = build_csf(canonicalize(random_tensor(rng, {10, 10, 30}, 400)),
                               ModeOrder::identity(3));
    const SplitConfig cfg{128, 32, 8};
    const auto rows = sweep_split(csf, {kNoSplit}, m, cfg);
    REQUIRE(rows.size() == 1);
    const auto direct = simulate(assign_slice_blocks(csf, cfg), csf, m);
    CHECK(rows[0].report.makespan_cycles == direct.makespan_cycles);
    CHECK(rows[0].report.per_block_cycles == direct.per_block_cycles);
  }
  SUBCASE("heavy fiber holding half the nonzeros: makespan nonincreasing") {
    std::vector<std::vector<std::size_t>> slices(16, std::vector<std::size_t>(4, 8));
    slices[0][0] = 512;  // 512 of 1024 nonzeros
    const auto csf = layout(slices);
    const auto rows = sweep_split(csf, {kNoSplit, 128, 32}, m, {128, 32, 8});
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(rows[i].report.makespan_cycles <= rows[i - 1].report.makespan_cycles);
    }
    CHECK(rows.back().report.makespan_cycles < rows.front().report.makespan_cycles);
  }
  SUBCASE("uniform tensor: flat across thresholds at or above the fiber size") {
    std::vector<std::vector<std::size_t>> slices(12, std::vector<std::size_t>(3, 16));
    const auto csf = layout(slices);
    const auto rows = sweep_split(csf, {kNoSplit, 64, 16}, m, {128, 512, 8});
    for (const auto& r : rows) CHECK(r.report.makespan_cycles == rows[0].report.makespan_cycles);
  }
  SUBCASE("empty threshold list") {
    CHECK_THROWS_AS(sweep_split(layout({{1}}), {}, m), ArgumentError);
  }
}
