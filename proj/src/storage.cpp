#include "tenkit/storage.hpp"

#include <nlohmann/json.hpp>

namespace tenkit {

namespace {

std::size_t coo_slices(const CooTensor& t, std::size_t mode) {
  std::vector<bool> seen(t.empty() ? 0 : t.dim(mode), false);
  std::size_t n = 0;
  for (index_t i : t.mode_indices(mode)) {
    if (!seen[i]) {
      seen[i] = true;
      ++n;
    }
  }
  return n;
}

StoragePart coo_part(const CooTensor& t, std::size_t slice_mode) {
  return {"COO", coo_slices(t, slice_mode), t.nnz(), t.nnz(), t.order() * t.nnz()};
}

StoragePart csf_part(const CsfTensor& t) {
  StoragePart p{"CSF", t.slices(), t.fibers(), t.nnz(), t.nnz()};
  for (std::size_t d = 0; d + 1 < t.order(); ++d) p.words += 2 * t.level_size(d);
  return p;
}

StoragePart csl_part(const CslSlices& s) {
  const std::size_t below = s.rest_idx.size();
  return {"CSL", s.slices(), s.nnz(), s.nnz(), 2 * s.slices() + below * s.nnz()};
}

}  // namespace

StorageReport storage_words(const CooTensor& t) {
  auto p = coo_part(t, 0);
  return {"COO", p.words, {p}};
}

StorageReport storage_words(const CsfTensor& t) {
  auto p = csf_part(t);
  return {t.fiber_split ? "B-CSF" : "CSF", p.words, {p}};
}

StorageReport storage_words(const CslSlices& s) {
  auto p = csl_part(s);
  return {"CSL", p.words, {p}};
}

StorageReport storage_words(const HbCsfTensor& h) {
  StorageReport r{"HB-CSF", 0,
                  {coo_part(h.coo_part, h.mode_order.root()), csl_part(h.csl_part),
                   csf_part(h.csf_part)}};
  for (const auto& p : r.parts) r.index_words += p.words;
  return r;
}

void to_json(nlohmann::json& j, const StoragePart& p) {
  j = {{"label", p.label}, {"slices", p.slices}, {"fibers", p.fibers}, {"nnz", p.nnz},
       {"words", p.words}};
}

void to_json(nlohmann::json& j, const StorageReport& r) {
  j = {{"format", r.format},
       {"index_words", r.index_words},
       {"bytes", r.bytes()},
       {"parts", r.parts},
       {"pointer_convention", "n words per pointer array (sentinel excluded)"}};
}

}  // namespace tenkit
