#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "tenkit/coo.hpp"
#include "tenkit/csf.hpp"

namespace tenkit {

enum class SliceKind { Coo, Csl, Csf };

std::string_view to_string(SliceKind k);

/// Compressed-slice storage: slice pointers address nonzeros directly, so the
/// fiber level is dropped. Admissible only when every fiber (level-1 node) of
/// a slice holds exactly one nonzero. Each nonzero keeps all of its
/// below-slice indices: `rest_idx[l][x]` is the mode_order[l+1] index.
struct CslSlices {
  std::vector<std::size_t> dims;
  ModeOrder mode_order;
  std::vector<index_t> slice_ptr;
  std::vector<index_t> slice_idx;
  std::vector<std::vector<index_t>> rest_idx;
  std::vector<value_t> values;

  std::size_t slices() const noexcept { return slice_idx.size(); }
  std::size_t nnz() const noexcept { return values.size(); }
  const std::vector<index_t>& mid_idx() const { return rest_idx.front(); }
  const std::vector<index_t>& leaf_idx() const { return rest_idx.back(); }
};

/// Slices partitioned into single-nonzero slices (COO), all-singleton-fiber
/// slices (CSL) and the rest (CSF). The three slice index sets are disjoint.
struct HbCsfTensor {
  std::vector<std::size_t> dims;
  ModeOrder mode_order;
  CooTensor coo_part;  ///< sorted by slice index
  CslSlices csl_part;
  CsfTensor csf_part;

  std::size_t nnz() const { return coo_part.nnz() + csl_part.nnz() + csf_part.nnz(); }
};

/// Per-slice label. COO iff the slice has one nonzero; CSL iff it has >= 2
/// nonzeros and every level-1 node below it has exactly one; CSF otherwise.
std::vector<SliceKind> classify_slices(const CsfTensor& csf);

HbCsfTensor build_hbcsf(const CooTensor& t, const ModeOrder& order);
HbCsfTensor build_hbcsf(const CsfTensor& csf);

/// All nonzeros of the three parts, sorted under the hybrid's mode order.
CooTensor flatten(const HbCsfTensor& h);
CooTensor flatten(const CslSlices& s);

}  // namespace tenkit
