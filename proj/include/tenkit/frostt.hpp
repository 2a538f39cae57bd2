#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tenkit/coo.hpp"

namespace tenkit {

/// Reads FROSTT `.tns` text: 1-based integer indices followed by a real value,
/// one nonzero per line. `#` lines and blank lines are skipped. The order is
/// taken from the first data line. Dims default to the largest index seen per
/// mode; `dims_override` (if given) must cover every index.
/// Duplicates are kept; use canonicalize() to merge them.
CooTensor parse_frostt(std::istream& in,
                       const std::optional<std::vector<std::size_t>>& dims_override = {});
CooTensor read_frostt(const std::string& path,
                      const std::optional<std::vector<std::size_t>>& dims_override = {});

/// Writes entries in their current order, 1-based, values at 17 significant digits.
void write_frostt(std::ostream& out, const CooTensor& t);
void write_frostt(const std::string& path, const CooTensor& t);

}  // namespace tenkit
