#include "tenkit/hbcsf.hpp"

#include "tenkit/errors.hpp"

namespace tenkit {

std::string_view to_string(SliceKind k) {
  switch (k) {
    case SliceKind::Coo: return "COO";
    case SliceKind::Csl: return "CSL";
    case SliceKind::Csf: return "CSF";
  }
  return "?";
}

std::vector<SliceKind> classify_slices(const CsfTensor& csf) {
  const std::size_t n = csf.order();
  if (n < 3) throw ArgumentError("slice classification needs order >= 3");
  std::vector<SliceKind> kinds(csf.slices());
  for (std::size_t s = 0; s < csf.slices(); ++s) {
    const auto [nb, ne] = csf.descend(0, s, n - 1);
    if (ne - nb == 1) {
      kinds[s] = SliceKind::Coo;
      continue;
    }
    // level-1 node count equals nonzero count iff each holds one nonzero
    const auto [cb, ce] = csf.descend(0, s, 1);
    kinds[s] = (ce - cb == ne - nb) ? SliceKind::Csl : SliceKind::Csf;
  }
  return kinds;
}

HbCsfTensor build_hbcsf(const CooTensor& t, const ModeOrder& order) {
  return build_hbcsf(build_csf(t, order));
}

HbCsfTensor build_hbcsf(const CsfTensor& csf) {
  const std::size_t n = csf.order();
  const auto kinds = classify_slices(csf);
  const auto& mo = csf.mode_order;

  HbCsfTensor h;
  h.dims = csf.dims;
  h.mode_order = mo;
  h.coo_part = CooTensor(csf.dims);
  h.csl_part.dims = csf.dims;
  h.csl_part.mode_order = mo;
  h.csl_part.rest_idx.assign(n - 1, {});
  h.csl_part.slice_ptr.push_back(0);

  CsfTensor& c = h.csf_part;
  c.dims = csf.dims;
  c.mode_order = mo;
  c.ptr.assign(n - 1, {});
  c.idx.assign(n - 1, {});
  c.fiber_split = csf.fiber_split;

  // per-leaf indices along each level, for COO/CSL emission
  std::vector<index_t> path(n);
  auto leaf_path = [&](std::size_t s, std::size_t leaf) {
    path[mo[0]] = csf.idx[0][s];
    std::size_t node = s;
    for (std::size_t d = 1; d + 1 < n; ++d) {
      // find child of `node` at level d containing `leaf`
      std::size_t b = csf.ptr[d - 1][node];
      std::size_t e = csf.ptr[d - 1][node + 1];
      while (b + 1 < e) {
        const std::size_t mid = (b + e) / 2;
        if (csf.descend(d, mid, n - 1).first <= leaf) b = mid; else e = mid;
      }
      node = b;
      path[mo[d]] = csf.idx[d][node];
    }
    path[mo.leaf()] = csf.leaf_idx[leaf];
  };

  for (std::size_t s = 0; s < csf.slices(); ++s) {
    const auto [nb, ne] = csf.descend(0, s, n - 1);
    switch (kinds[s]) {
      case SliceKind::Coo: {
        leaf_path(s, nb);
        h.coo_part.push_back(path, csf.values[nb]);
        break;
      }
      case SliceKind::Csl: {
        auto& p = h.csl_part;
        p.slice_idx.push_back(csf.idx[0][s]);
        for (std::size_t x = nb; x < ne; ++x) {
          leaf_path(s, x);
          for (std::size_t l = 1; l < n; ++l) p.rest_idx[l - 1].push_back(path[mo[l]]);
          p.values.push_back(csf.values[x]);
        }
        p.slice_ptr.push_back(static_cast<index_t>(p.values.size()));
        break;
      }
      case SliceKind::Csf: {
        // copy the subtree, rebasing pointers
        std::size_t b = s, e = s + 1;
        for (std::size_t d = 0; d + 1 < n; ++d) {
          const std::size_t child_base = d + 2 < n ? c.idx[d + 1].size() : c.values.size();
          const std::size_t src_child_base = csf.ptr[d][b];
          for (std::size_t node = b; node < e; ++node) {
            c.idx[d].push_back(csf.idx[d][node]);
            c.ptr[d].push_back(
                static_cast<index_t>(child_base + csf.ptr[d][node] - src_child_base));
          }
          const std::size_t nb2 = csf.ptr[d][b];
          const std::size_t ne2 = csf.ptr[d][e];
          b = nb2;
          e = ne2;
        }
        c.leaf_idx.insert(c.leaf_idx.end(), csf.leaf_idx.begin() + b, csf.leaf_idx.begin() + e);
        c.values.insert(c.values.end(), csf.values.begin() + b, csf.values.begin() + e);
        break;
      }
    }
  }
  for (std::size_t d = 0; d + 1 < n; ++d) {
    c.ptr[d].push_back(static_cast<index_t>(d + 2 < n ? c.idx[d + 1].size() : c.values.size()));
  }
  return h;
}

CooTensor flatten(const CslSlices& s) {
  const std::size_t n = s.mode_order.size();
  std::vector<std::vector<index_t>> inds(n, std::vector<index_t>(s.nnz()));
  for (std::size_t sl = 0; sl < s.slices(); ++sl) {
    for (std::size_t x = s.slice_ptr[sl]; x < s.slice_ptr[sl + 1]; ++x) {
      inds[s.mode_order[0]][x] = s.slice_idx[sl];
    }
  }
  for (std::size_t l = 1; l < n; ++l) inds[s.mode_order[l]] = s.rest_idx[l - 1];
  return sort_by_mode_order(CooTensor(s.dims, std::move(inds), s.values), s.mode_order);
}

CooTensor flatten(const HbCsfTensor& h) {
  CooTensor all(h.dims);
  std::vector<index_t> idx(h.dims.size());
  auto append = [&](const CooTensor& part) {
    for (std::size_t x = 0; x < part.nnz(); ++x) {
      for (std::size_t d = 0; d < idx.size(); ++d) idx[d] = part.index(x, d);
      all.push_back(idx, part.value(x));
    }
  };
  append(h.coo_part);
  append(flatten(h.csl_part));
  append(flatten(h.csf_part));
  return sort_by_mode_order(all, h.mode_order);
}

}  // namespace tenkit
