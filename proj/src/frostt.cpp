#include "tenkit/frostt.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string_view>

#include <fmt/format.h>

#include "tenkit/errors.hpp"

namespace tenkit {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::uint64_t parse_index(std::string_view f, std::size_t lineno) {
  if (!f.empty() && f.front() == '-') {
    throw ParseError("index must be >= 1, got '" + std::string(f) + "'", lineno);
  }
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || p != f.data() + f.size()) {
    throw ParseError("non-integer index '" + std::string(f) + "'", lineno);
  }
  if (v < 1) throw ParseError("index must be >= 1, got 0", lineno);
  if (v > std::numeric_limits<index_t>::max()) {
    throw ParseError("index exceeds 32-bit range", lineno);
  }
  return v;
}

value_t parse_value(std::string_view f, std::size_t lineno) {
  // from_chars for double is available in libstdc++ >= 11
  value_t v = 0.0;
  auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || p != f.data() + f.size()) {
    throw ParseError("non-numeric value '" + std::string(f) + "'", lineno);
  }
  return v;
}

}  // namespace

CooTensor parse_frostt(std::istream& in,
                       const std::optional<std::vector<std::size_t>>& dims_override) {
  std::size_t order = 0;
  std::vector<std::vector<index_t>> inds;
  std::vector<value_t> vals;
  std::vector<std::size_t> maxidx;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto fields = split_fields(line);
    if (fields.empty() || fields.front().front() == '#') continue;
    if (order == 0) {
      if (fields.size() < 2) throw ParseError("data line needs indices and a value", lineno);
      order = fields.size() - 1;
      inds.resize(order);
      maxidx.assign(order, 0);
    } else if (fields.size() != order + 1) {
      throw ParseError("arity mismatch: expected " + std::to_string(order + 1) +
                           " fields, got " + std::to_string(fields.size()),
                       lineno);
    }
    for (std::size_t d = 0; d < order; ++d) {
      const auto i = parse_index(fields[d], lineno);
      inds[d].push_back(static_cast<index_t>(i - 1));
      maxidx[d] = std::max<std::size_t>(maxidx[d], i);
    }
    vals.push_back(parse_value(fields[order], lineno));
  }
  if (order == 0) throw ParseError("no data lines", lineno);
  std::vector<std::size_t> dims = maxidx;
  if (dims_override) {
    if (dims_override->size() != order) {
      throw ArgumentError("explicit dims have " + std::to_string(dims_override->size()) +
                          " modes, file has " + std::to_string(order));
    }
    for (std::size_t d = 0; d < order; ++d) {
      if ((*dims_override)[d] < maxidx[d]) {
        throw ArgumentError("explicit dim " + std::to_string((*dims_override)[d]) +
                            " smaller than max index " + std::to_string(maxidx[d]) +
                            " in mode " + std::to_string(d));
      }
    }
    dims = *dims_override;
  }
  return CooTensor(std::move(dims), std::move(inds), std::move(vals));
}

CooTensor read_frostt(const std::string& path,
                      const std::optional<std::vector<std::size_t>>& dims_override) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return parse_frostt(in, dims_override);
  } catch (const ParseError& e) {
    throw ParseError(e.detail(), e.line(), path);
  }
}

void write_frostt(std::ostream& out, const CooTensor& t) {
  std::string buf;
  for (std::size_t x = 0; x < t.nnz(); ++x) {
    buf.clear();
    for (std::size_t d = 0; d < t.order(); ++d) {
      fmt::format_to(std::back_inserter(buf), "{} ", std::uint64_t{t.index(x, d)} + 1);
    }
    fmt::format_to(std::back_inserter(buf), "{:.17g}\n", t.value(x));
    out << buf;
  }
}

void write_frostt(const std::string& path, const CooTensor& t) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_frostt(out, t);
}

}  // namespace tenkit
