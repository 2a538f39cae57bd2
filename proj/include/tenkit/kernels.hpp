#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tenkit/balance.hpp"
#include "tenkit/coo.hpp"
#include "tenkit/csf.hpp"
#include "tenkit/factor.hpp"
#include "tenkit/hbcsf.hpp"

namespace tenkit {

/// Sequential runs are deterministic. Parallel runs partition work by slice
/// (or schedule unit) over OpenMP threads; rows that several workers can touch
/// are updated with atomic adds, so results can differ from the sequential
/// run by reduction-order rounding.
struct ExecOptions {
  bool parallel = false;
  int threads = 0;  ///< 0 = OpenMP default
};

struct MttkrpResult {
  FactorMatrix output;
  OpCount ops;
};

/// Per nonzero: value times the Hadamard product of the other modes' rows,
/// added into output row idx[mode]. Ops: (N-1)MR muls, MR adds.
MttkrpResult mttkrp_coo(const CooTensor& t, std::span<const FactorMatrix> factors,
                        std::size_t mode, const ExecOptions& exec = {});

/// Fiber-factored CSF kernel; requires t.mode_order.root() == mode.
///
/// Each nonzero accumulates value * leaf-row into a per-fiber buffer (1 mul +
/// 1 add). Each fiber scales its buffer by its own factor row into the parent
/// buffer, counted as one fused multiply. Intermediate levels (order >= 4)
/// count one mul and one add per node, and each slice adds its buffer to the
/// output row. For order 3 this gives (M+F)R muls and (M+S)R adds.
MttkrpResult mttkrp_csf(const CsfTensor& t, std::span<const FactorMatrix> factors,
                        std::size_t mode, const ExecOptions& exec = {});

/// CSL kernel, accumulating into `out` (rows of the CSL slices only).
/// Ops: (N-1) * M_csl * R muls, M_csl * R adds.
OpCount mttkrp_csl(const CslSlices& s, std::span<const FactorMatrix> factors, std::size_t mode,
                   FactorMatrix& out, const ExecOptions& exec = {});

/// Sum of the COO, CSL and CSF sub-kernels.
MttkrpResult mttkrp_hbcsf(const HbCsfTensor& h, std::span<const FactorMatrix> factors,
                          std::size_t mode, const ExecOptions& exec = {});

/// Schedule-driven CSF kernel: each unit covers a contiguous fiber range of
/// one slice, and units of the same slice combine with atomic adds.
MttkrpResult mttkrp_bcsf(const CsfTensor& t, const BlockSchedule& schedule,
                         std::span<const FactorMatrix> factors, std::size_t mode,
                         const ExecOptions& exec = {});

inline constexpr std::size_t kDenseOracleCeiling = 10'000'000;

/// Reference MTTKRP that materialises the Khatri-Rao product of the non-mode
/// factors and multiplies the mode-n unfolding by it. Unfolding column z of
/// the remaining modes (m1 < m2 < ...) is z = i_m1 + dim_m1 * (i_m2 + ...).
/// Throws CapacityError when the Khatri-Rao matrix exceeds `max_scalars`.
FactorMatrix mttkrp_dense_oracle(const CooTensor& t, std::span<const FactorMatrix> factors,
                                 std::size_t mode,
                                 std::size_t max_scalars = kDenseOracleCeiling);

/// Largest per-row relative deviation ||a_i - b_i|| / max(||b_i||, floor)
/// with floor = 1e-300 guarding empty rows.
double max_row_relative_deviation(const FactorMatrix& a, const FactorMatrix& b);

}  // namespace tenkit
