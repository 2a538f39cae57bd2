#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tenkit/coo.hpp"
#include "tenkit/csf.hpp"
#include "tenkit/hbcsf.hpp"

namespace tenkit {

/// Index-storage accounting in 4-byte words. Values are not counted.
///
/// Pointer arrays count one word per node; the trailing n+1 sentinel offset
/// is excluded, so an order-3 CSF costs exactly 2S + 2F + M words.
struct StoragePart {
  std::string label;
  std::size_t slices = 0;
  std::size_t fibers = 0;
  std::size_t nnz = 0;
  std::size_t words = 0;
};

struct StorageReport {
  std::string format;
  std::size_t index_words = 0;
  std::vector<StoragePart> parts;

  std::size_t bytes() const noexcept { return 4 * index_words; }
};

StorageReport storage_words(const CooTensor& t);
StorageReport storage_words(const CsfTensor& t);
StorageReport storage_words(const CslSlices& s);
StorageReport storage_words(const HbCsfTensor& h);

void to_json(nlohmann::json& j, const StoragePart& p);
void to_json(nlohmann::json& j, const StorageReport& r);

}  // namespace tenkit
