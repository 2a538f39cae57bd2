#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tenkit/balance.hpp"
#include "tenkit/coo.hpp"
#include "tenkit/csf.hpp"
#include "tenkit/hbcsf.hpp"
#include "tenkit/kernels.hpp"
#include "tenkit/storage.hpp"

namespace tenkit {

enum class Format { Coo, Csf, Bcsf, Hbcsf };

std::string_view to_string(Format f);
/// Accepts "coo", "csf", "bcsf", "hbcsf" (case-sensitive); throws ArgumentError otherwise.
Format parse_format(std::string_view name);

/// The per-mode representation used by one MTTKRP call. B-CSF is a fiber
/// split CSF plus its block schedule; HB-CSF splits only its CSF part.
struct ModeRepresentation {
  Format format = Format::Coo;
  std::size_t mode = 0;
  std::optional<CsfTensor> csf;
  std::optional<BlockSchedule> schedule;
  std::optional<HbCsfTensor> hbcsf;

  StorageReport storage(const CooTensor& coo) const;
};

/// Runs the kernel matching `rep.format` for `rep.mode`; `coo` is the tensor
/// the representation was built from.
MttkrpResult mttkrp(const ModeRepresentation& rep, const CooTensor& coo,
                    std::span<const FactorMatrix> factors, const ExecOptions& exec = {});

/// One representation per mode (the COO tensor is shared by all modes).
class AllModeTensor {
 public:
  AllModeTensor(CooTensor coo, Format format, const SplitConfig& cfg = {});

  MttkrpResult mttkrp(std::span<const FactorMatrix> factors, std::size_t mode,
                      const ExecOptions& exec = {}) const;

  const CooTensor& coo() const noexcept { return coo_; }
  Format format() const noexcept { return format_; }
  const ModeRepresentation& mode(std::size_t m) const { return modes_.at(m); }
  std::size_t order() const noexcept { return coo_.order(); }
  const std::vector<std::size_t>& dims() const noexcept { return coo_.dims(); }

 private:
  CooTensor coo_;
  Format format_;
  std::vector<ModeRepresentation> modes_;
};

/// Builds the mode-`mode` representation rooted at ModeOrder::for_mode.
ModeRepresentation build_representation(const CooTensor& coo, Format format, std::size_t mode,
                                        const SplitConfig& cfg = {});

}  // namespace tenkit
