#include "tenkit/representation.hpp"

#include <string>

#include "tenkit/errors.hpp"

namespace tenkit {

std::string_view to_string(Format f) {
  switch (f) {
    case Format::Coo: return "coo";
    case Format::Csf: return "csf";
    case Format::Bcsf: return "bcsf";
    case Format::Hbcsf: return "hbcsf";
  }
  return "?";
}

Format parse_format(std::string_view name) {
  for (Format f : {Format::Coo, Format::Csf, Format::Bcsf, Format::Hbcsf}) {
    if (to_string(f) == name) return f;
  }
  throw ArgumentError("unknown format '" + std::string(name) +
                      "' (expected coo, csf, bcsf or hbcsf)");
}

ModeRepresentation build_representation(const CooTensor& coo, Format format, std::size_t mode,
                                        const SplitConfig& cfg) {
  ModeRepresentation rep;
  rep.format = format;
  rep.mode = mode;
  if (format == Format::Coo) return rep;
  const ModeOrder order = ModeOrder::for_mode(mode, coo.dims());
  CsfTensor csf = build_csf(coo, order);
  switch (format) {
    case Format::Csf:
      rep.csf = std::move(csf);
      break;
    case Format::Bcsf:
      rep.csf = split_fibers(csf, cfg);
      rep.schedule = assign_slice_blocks(*rep.csf, cfg);
      break;
    case Format::Hbcsf: {
      HbCsfTensor h = build_hbcsf(csf);
      // CSL slices have no heavy fibers; only the CSF part is split
      h.csf_part = split_fibers(h.csf_part, cfg);
      rep.hbcsf = std::move(h);
      break;
    }
    case Format::Coo:
      break;
  }
  return rep;
}

StorageReport ModeRepresentation::storage(const CooTensor& coo) const {
  switch (format) {
    case Format::Coo: return storage_words(coo);
    case Format::Csf:
    case Format::Bcsf: return storage_words(*csf);
    case Format::Hbcsf: return storage_words(*hbcsf);
  }
  return {};
}

AllModeTensor::AllModeTensor(CooTensor coo, Format format, const SplitConfig& cfg)
    : coo_(std::move(coo)), format_(format) {
  modes_.reserve(coo_.order());
  for (std::size_t m = 0; m < coo_.order(); ++m) {
    modes_.push_back(build_representation(coo_, format, m, cfg));
  }
}

MttkrpResult mttkrp(const ModeRepresentation& rep, const CooTensor& coo,
                    std::span<const FactorMatrix> factors, const ExecOptions& exec) {
  switch (rep.format) {
    case Format::Coo: return mttkrp_coo(coo, factors, rep.mode, exec);
    case Format::Csf: return mttkrp_csf(*rep.csf, factors, rep.mode, exec);
    case Format::Bcsf: return mttkrp_bcsf(*rep.csf, *rep.schedule, factors, rep.mode, exec);
    case Format::Hbcsf: return mttkrp_hbcsf(*rep.hbcsf, factors, rep.mode, exec);
  }
  throw ArgumentError("unhandled format");
}

MttkrpResult AllModeTensor::mttkrp(std::span<const FactorMatrix> factors, std::size_t mode,
                                   const ExecOptions& exec) const {
  return tenkit::mttkrp(modes_.at(mode), coo_, factors, exec);
}

}  // namespace tenkit
