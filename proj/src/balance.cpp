#include "tenkit/balance.hpp"

#include <nlohmann/json.hpp>

#include "tenkit/errors.hpp"

namespace tenkit {

void SplitConfig::validate() const {
  if (fiber_threshold == 0) throw ArgumentError("fiber threshold must be >= 1");
  if (block_size == 0 || warp_size == 0) throw ArgumentError("block and warp size must be >= 1");
  if (block_size % warp_size != 0) throw ArgumentError("warp size must divide block size");
}

CsfTensor split_fibers(const CsfTensor& t, const SplitConfig& cfg) {
  cfg.validate();
  const std::size_t n = t.order();
  const std::size_t fl = n - 2;  // fiber level
  const std::size_t tau = cfg.fiber_threshold;
  CsfTensor out = t;
  out.idx[fl].clear();
  out.ptr[fl].clear();
  // new position of the first segment of each original fiber, plus sentinel
  std::vector<index_t> first_seg(t.fibers() + 1);
  for (std::size_t f = 0; f < t.fibers(); ++f) {
    first_seg[f] = static_cast<index_t>(out.idx[fl].size());
    const auto [b, e] = t.fiber_nonzeros(f);
    for (std::size_t s = b; s < e; s += tau) {
      out.idx[fl].push_back(t.idx[fl][f]);
      out.ptr[fl].push_back(static_cast<index_t>(s));
    }
  }
  first_seg[t.fibers()] = static_cast<index_t>(out.idx[fl].size());
  out.fiber_split = t.fiber_split || out.idx[fl].size() != t.fibers();
  out.ptr[fl].push_back(static_cast<index_t>(t.nnz()));
  if (fl > 0) {
    for (auto& p : out.ptr[fl - 1]) p = first_seg[p];
  }
  return out;
}

BlockSchedule one_block_per_slice(const CsfTensor& t) {
  BlockSchedule sch;
  sch.multiplicity.assign(t.slices(), 1);
  for (std::size_t s = 0; s < t.slices(); ++s) {
    const auto [fb, fe] = t.slice_fibers(s);
    sch.units.push_back({s, s, fb, fe});
  }
  return sch;
}

BlockSchedule assign_slice_blocks(const CsfTensor& t, const SplitConfig& cfg) {
  cfg.validate();
  BlockSchedule sch;
  sch.multiplicity.resize(t.slices());
  for (std::size_t s = 0; s < t.slices(); ++s) {
    const auto [fb, fe] = t.slice_fibers(s);
    const auto [nb, ne] = t.descend(0, s, t.order() - 1);
    const std::size_t m = ne - nb;
    const std::size_t mult = std::max<std::size_t>(1, (m + cfg.block_size - 1) / cfg.block_size);
    const std::size_t target = (m + mult - 1) / mult;
    std::size_t begin = fb;
    std::size_t acc = 0;
    for (std::size_t f = fb; f < fe; ++f) {
      const auto [b, e] = t.fiber_nonzeros(f);
      acc += e - b;
      if (acc >= target && f + 1 < fe) {
        sch.units.push_back({sch.units.size(), s, begin, f + 1});
        begin = f + 1;
        acc = 0;
      }
    }
    sch.units.push_back({sch.units.size(), s, begin, fe});
    sch.multiplicity[s] = mult;
  }
  return sch;
}

void check_covers(const BlockSchedule& schedule, const CsfTensor& t) {
  std::vector<int> hits(t.fibers(), 0);
  for (const auto& u : schedule.units) {
    if (u.slice >= t.slices()) throw ArgumentError("schedule names a slice outside the tensor");
    const auto [fb, fe] = t.slice_fibers(u.slice);
    if (u.fiber_begin < fb || u.fiber_end > fe || u.fiber_begin > u.fiber_end) {
      throw ArgumentError("schedule unit fiber range outside its slice");
    }
    for (std::size_t f = u.fiber_begin; f < u.fiber_end; ++f) ++hits[f];
  }
  for (int h : hits) {
    if (h != 1) throw ArgumentError("schedule does not cover every fiber exactly once");
  }
}

ImbalanceMetrics imbalance_metrics(const CsfTensor& t) {
  ImbalanceMetrics m;
  m.slices = t.slices();
  m.fibers = t.fibers();
  m.nnz = t.nnz();
  std::vector<std::size_t> per_slice(t.slices()), per_fiber(t.fibers());
  for (std::size_t s = 0; s < t.slices(); ++s) {
    const auto [b, e] = t.descend(0, s, t.order() - 1);
    per_slice[s] = e - b;
  }
  for (std::size_t f = 0; f < t.fibers(); ++f) {
    const auto [b, e] = t.fiber_nonzeros(f);
    per_fiber[f] = e - b;
  }
  m.nnz_per_slice = summarize(per_slice);
  m.nnz_per_fiber = summarize(per_fiber);
  return m;
}

void to_json(nlohmann::json& j, const ImbalanceMetrics& m) {
  j = {{"S", m.slices},
       {"F", m.fibers},
       {"M", m.nnz},
       {"stddev_slc", m.nnz_per_slice.stddev},
       {"stddev_fbr", m.nnz_per_fiber.stddev},
       {"max_slc", m.nnz_per_slice.max},
       {"max_fbr", m.nnz_per_fiber.max},
       {"mean_slc", m.nnz_per_slice.mean},
       {"mean_fbr", m.nnz_per_fiber.mean}};
}

}  // namespace tenkit
