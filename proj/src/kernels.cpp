#include "tenkit/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <string>

#include <omp.h>

#include "tenkit/errors.hpp"

namespace tenkit {

namespace {

/// Validates factor shapes and returns the rank.
std::size_t check_factors(std::span<const std::size_t> dims, std::span<const FactorMatrix> f,
                          std::size_t mode) {
  const std::size_t n = dims.size();
  if (mode >= n) {
    throw ArgumentError("mode " + std::to_string(mode) + " out of range for order " +
                        std::to_string(n));
  }
  if (f.size() != n) {
    throw ArgumentError("expected " + std::to_string(n) + " factors, got " +
                        std::to_string(f.size()));
  }
  std::size_t rank = 0;
  for (std::size_t d = 0; d < n; ++d) {
    if (d == mode) continue;
    if (f[d].rows() != dims[d]) {
      throw ArgumentError("factor " + std::to_string(d) + " has " + std::to_string(f[d].rows()) +
                          " rows, mode dimension is " + std::to_string(dims[d]));
    }
    if (rank == 0) rank = f[d].cols();
    if (f[d].cols() != rank) throw ArgumentError("factors disagree on rank");
  }
  if (rank == 0) throw ArgumentError("rank must be >= 1");
  return rank;
}

void set_threads(const ExecOptions& exec) {
  if (exec.parallel && exec.threads > 0) omp_set_num_threads(exec.threads);
}

inline void add_row(std::span<double> dst, const double* src, bool atomic) {
  if (atomic) {
    for (std::size_t r = 0; r < dst.size(); ++r) {
      std::atomic_ref<double>(dst[r]).fetch_add(src[r], std::memory_order_relaxed);
    }
  } else {
    for (std::size_t r = 0; r < dst.size(); ++r) dst[r] += src[r];
  }
}

/// Depth-first CSF traversal restricted to a window of fibers.
class CsfWalker {
 public:
  CsfWalker(const CsfTensor& t, std::span<const FactorMatrix> f, std::size_t rank)
      : t_(t), f_(f), rank_(rank), fiber_level_(t.order() - 2),
        scratch_(t.order(), std::vector<double>(rank)) {}

  /// Adds slice `s`'s contribution over fibers [lo, hi) into `out`.
  void slice(std::size_t s, std::size_t lo, std::size_t hi, FactorMatrix& out, bool atomic) {
    auto& acc = scratch_[0];
    std::fill(acc.begin(), acc.end(), 0.0);
    if (fiber_level_ == 0) {
      // order 2: the slice is its own fiber
      leaf_sum(s, acc.data());
    } else {
      children(0, s, lo, hi, acc.data());
    }
    add_row(out.row(t_.idx[0][s]), acc.data(), atomic);
    ops.adds += rank_;
  }

  OpCount ops;

 private:
  void children(std::size_t d, std::size_t node, std::size_t lo, std::size_t hi, double* acc) {
    for (std::size_t c = t_.ptr[d][node]; c < t_.ptr[d][node + 1]; ++c) {
      const auto [fb, fe] = t_.descend(d + 1, c, fiber_level_);
      if (fe <= lo || fb >= hi) continue;
      visit(d + 1, c, lo, hi, acc);
    }
  }

  void leaf_sum(std::size_t fiber, double* tmp) {
    const FactorMatrix& leaf = f_[t_.mode_order.leaf()];
    const auto [b, e] = t_.fiber_nonzeros(fiber);
    for (std::size_t x = b; x < e; ++x) {
      const double v = t_.values[x];
      const auto row = leaf.row(t_.leaf_idx[x]);
      for (std::size_t r = 0; r < rank_; ++r) tmp[r] += v * row[r];
    }
    ops.muls += (e - b) * rank_;
    ops.adds += (e - b) * rank_;
  }

  void visit(std::size_t d, std::size_t node, std::size_t lo, std::size_t hi, double* acc) {
    double* tmp = scratch_[d].data();
    std::fill(tmp, tmp + rank_, 0.0);
    if (d == fiber_level_) {
      leaf_sum(node, tmp);
    } else {
      children(d, node, lo, hi, tmp);
      ops.adds += rank_;
    }
    const auto row = f_[t_.mode_order[d]].row(t_.idx[d][node]);
    for (std::size_t r = 0; r < rank_; ++r) acc[r] += tmp[r] * row[r];
    ops.muls += rank_;
  }

  const CsfTensor& t_;
  std::span<const FactorMatrix> f_;
  std::size_t rank_;
  std::size_t fiber_level_;
  std::vector<std::vector<double>> scratch_;
};

}  // namespace

MttkrpResult mttkrp_coo(const CooTensor& t, std::span<const FactorMatrix> factors,
                        std::size_t mode, const ExecOptions& exec) {
  const std::size_t rank = check_factors(t.dims(), factors, mode);
  const std::size_t n = t.order();
  MttkrpResult res{FactorMatrix(t.dim(mode), rank), {}};
  const std::int64_t m = static_cast<std::int64_t>(t.nnz());
  set_threads(exec);
#pragma omp parallel if (exec.parallel)
  {
    std::vector<double> prod(rank);
#pragma omp for schedule(static)
    for (std::int64_t x = 0; x < m; ++x) {
      const double v = t.value(x);
      std::fill(prod.begin(), prod.end(), v);
      for (std::size_t d = 0; d < n; ++d) {
        if (d == mode) continue;
        const auto row = factors[d].row(t.index(x, d));
        for (std::size_t r = 0; r < rank; ++r) prod[r] *= row[r];
      }
      add_row(res.output.row(t.index(x, mode)), prod.data(), exec.parallel);
    }
  }
  res.ops.muls = (n - 1) * t.nnz() * rank;
  res.ops.adds = t.nnz() * rank;
  return res;
}

MttkrpResult mttkrp_csf(const CsfTensor& t, std::span<const FactorMatrix> factors,
                        std::size_t mode, const ExecOptions& exec) {
  const std::size_t rank = check_factors(t.dims, factors, mode);
  if (t.mode_order.root() != mode) {
    throw ArgumentError("CSF tree is rooted at mode " + std::to_string(t.mode_order.root()) +
                        ", kernel asked for mode " + std::to_string(mode));
  }
  MttkrpResult res{FactorMatrix(t.dims[mode], rank), {}};
  const std::int64_t slices = static_cast<std::int64_t>(t.slices());
  set_threads(exec);
#pragma omp parallel if (exec.parallel)
  {
    CsfWalker walk(t, factors, rank);
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t s = 0; s < slices; ++s) {
      const auto [fb, fe] = t.slice_fibers(s);
      // slice index values are unique, so output rows are private to a slice
      walk.slice(s, fb, fe, res.output, false);
    }
#pragma omp critical
    res.ops += walk.ops;
  }
  return res;
}

OpCount mttkrp_csl(const CslSlices& s, std::span<const FactorMatrix> factors, std::size_t mode,
                   FactorMatrix& out, const ExecOptions& exec) {
  const std::size_t rank = check_factors(s.dims, factors, mode);
  if (s.mode_order.root() != mode) throw ArgumentError("CSL slices not rooted at kernel mode");
  if (out.rows() != s.dims[mode] || out.cols() != rank) {
    throw ArgumentError("CSL output matrix has the wrong shape");
  }
  const std::size_t below = s.rest_idx.size();
  const std::int64_t slices = static_cast<std::int64_t>(s.slices());
  set_threads(exec);
#pragma omp parallel if (exec.parallel)
  {
    std::vector<double> acc(rank), prod(rank);
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t sl = 0; sl < slices; ++sl) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t x = s.slice_ptr[sl]; x < s.slice_ptr[sl + 1]; ++x) {
        std::fill(prod.begin(), prod.end(), s.values[x]);
        for (std::size_t l = 0; l < below; ++l) {
          const auto row = factors[s.mode_order[l + 1]].row(s.rest_idx[l][x]);
          for (std::size_t r = 0; r < rank; ++r) prod[r] *= row[r];
        }
        for (std::size_t r = 0; r < rank; ++r) acc[r] += prod[r];
      }
      add_row(out.row(s.slice_idx[sl]), acc.data(), false);
    }
  }
  return {below * s.nnz() * rank, s.nnz() * rank};
}

MttkrpResult mttkrp_hbcsf(const HbCsfTensor& h, std::span<const FactorMatrix> factors,
                          std::size_t mode, const ExecOptions& exec) {
  const std::size_t rank = check_factors(h.dims, factors, mode);
  if (h.mode_order.root() != mode) throw ArgumentError("HB-CSF not rooted at kernel mode");
  MttkrpResult res{FactorMatrix(h.dims[mode], rank), {}};
  if (!h.coo_part.empty()) {
    auto coo = mttkrp_coo(h.coo_part, factors, mode, exec);
    // slice sets are disjoint, so the parts never share an output row
    for (std::size_t i = 0; i < h.coo_part.nnz(); ++i) {
      const index_t row = h.coo_part.index(i, mode);
      add_row(res.output.row(row), coo.output.row(row).data(), false);
    }
    res.ops += coo.ops;
  }
  res.ops += mttkrp_csl(h.csl_part, factors, mode, res.output, exec);
  if (h.csf_part.nnz() > 0) {
    auto csf = mttkrp_csf(h.csf_part, factors, mode, exec);
    for (std::size_t s = 0; s < h.csf_part.slices(); ++s) {
      const index_t row = h.csf_part.idx[0][s];
      add_row(res.output.row(row), csf.output.row(row).data(), false);
    }
    res.ops += csf.ops;
  }
  return res;
}

MttkrpResult mttkrp_bcsf(const CsfTensor& t, const BlockSchedule& schedule,
                         std::span<const FactorMatrix> factors, std::size_t mode,
                         const ExecOptions& exec) {
  const std::size_t rank = check_factors(t.dims, factors, mode);
  if (t.mode_order.root() != mode) throw ArgumentError("B-CSF not rooted at kernel mode");
  check_covers(schedule, t);
  std::vector<std::size_t> units_per_slice(t.slices(), 0);
  for (const auto& u : schedule.units) ++units_per_slice[u.slice];

  MttkrpResult res{FactorMatrix(t.dims[mode], rank), {}};
  const std::int64_t units = static_cast<std::int64_t>(schedule.units.size());
  set_threads(exec);
#pragma omp parallel if (exec.parallel)
  {
    CsfWalker walk(t, factors, rank);
#pragma omp for schedule(dynamic, 8)
    for (std::int64_t u = 0; u < units; ++u) {
      const auto& unit = schedule.units[u];
      walk.slice(unit.slice, unit.fiber_begin, unit.fiber_end, res.output,
                 exec.parallel && units_per_slice[unit.slice] > 1);
    }
#pragma omp critical
    res.ops += walk.ops;
  }
  return res;
}

FactorMatrix mttkrp_dense_oracle(const CooTensor& t, std::span<const FactorMatrix> factors,
                                 std::size_t mode, std::size_t max_scalars) {
  const std::size_t rank = check_factors(t.dims(), factors, mode);
  std::vector<std::size_t> rest;
  for (std::size_t d = 0; d < t.order(); ++d) {
    if (d != mode) rest.push_back(d);
  }
  std::size_t cols = 1;
  for (std::size_t d : rest) {
    cols *= t.dim(d);
    if (cols * rank > max_scalars) {
      throw CapacityError("Khatri-Rao product would exceed " + std::to_string(max_scalars) +
                          " scalars");
    }
  }
  // Khatri-Rao rows: the first remaining mode varies fastest
  FactorMatrix kr(cols, rank, 1.0);
  for (std::size_t z = 0; z < cols; ++z) {
    std::size_t rem = z;
    for (std::size_t d : rest) {
      const std::size_t i = rem % t.dim(d);
      rem /= t.dim(d);
      for (std::size_t r = 0; r < rank; ++r) kr(z, r) *= factors[d](i, r);
    }
  }
  // mode-n unfolding, duplicates summed
  std::vector<std::map<std::size_t, double>> unfold(t.dim(mode));
  for (std::size_t x = 0; x < t.nnz(); ++x) {
    std::size_t z = 0;
    for (auto it = rest.rbegin(); it != rest.rend(); ++it) z = z * t.dim(*it) + t.index(x, *it);
    unfold[t.index(x, mode)][z] += t.value(x);
  }
  FactorMatrix y(t.dim(mode), rank);
  for (std::size_t i = 0; i < unfold.size(); ++i) {
    for (const auto& [z, v] : unfold[i]) {
      for (std::size_t r = 0; r < rank; ++r) y(i, r) += v * kr(z, r);
    }
  }
  return y;
}

double max_row_relative_deviation(const FactorMatrix& a, const FactorMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ArgumentError("matrix shapes differ");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double diff = 0.0, ref = 0.0;
    for (std::size_t r = 0; r < a.cols(); ++r) {
      diff += (a(i, r) - b(i, r)) * (a(i, r) - b(i, r));
      ref += b(i, r) * b(i, r);
    }
    worst = std::max(worst, std::sqrt(diff) / std::max(std::sqrt(ref), 1e-300));
  }
  return worst;
}

}  // namespace tenkit
