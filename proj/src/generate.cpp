#include "tenkit/generate.hpp"

#include <cmath>
#include <random>
#include <string>
#include <unordered_set>

#include "tenkit/errors.hpp"

namespace tenkit {

namespace {

std::discrete_distribution<std::size_t> zipf(std::size_t n, double skew) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::pow(static_cast<double>(i + 1), -skew);
  return std::discrete_distribution<std::size_t>(w.begin(), w.end());
}

struct KeyHash {
  std::size_t operator()(const std::vector<index_t>& k) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (index_t v : k) h = (h ^ v) * 1099511628211ull;
    return h;
  }
};

}  // namespace

CooTensor generate_powerlaw(const GenOptions& opts) {
  const std::size_t n = opts.dims.size();
  if (n < 2) throw ArgumentError("generator needs at least two modes");
  if (opts.skew < 0) throw ArgumentError("skew must be >= 0");
  long double cells = 1;
  for (std::size_t d : opts.dims) {
    if (d == 0) throw ArgumentError("dims must be positive");
    cells *= static_cast<long double>(d);
  }
  if (static_cast<long double>(opts.nnz) > cells) {
    throw ArgumentError("nnz " + std::to_string(opts.nnz) + " exceeds shape capacity");
  }
  std::mt19937_64 rng(opts.seed);
  std::vector<std::discrete_distribution<std::size_t>> skewed;
  skewed.push_back(zipf(opts.dims[0], opts.skew));
  skewed.push_back(zipf(opts.dims[1], opts.skew));
  std::uniform_real_distribution<double> val(0.0, 1.0);

  CooTensor t(opts.dims);
  t.reserve(opts.nnz);
  std::unordered_set<std::vector<index_t>, KeyHash> seen;
  std::vector<index_t> key(n);
  const std::size_t max_attempts = 64 * opts.nnz + 1024;
  std::size_t attempts = 0;
  while (t.nnz() < opts.nnz) {
    if (++attempts > max_attempts) {
      throw ArgumentError("could not place " + std::to_string(opts.nnz) +
                          " distinct nonzeros; enlarge the shape or lower the skew");
    }
    for (std::size_t d = 0; d < n; ++d) {
      if (d < 2) {
        key[d] = static_cast<index_t>(skewed[d](rng));
      } else {
        key[d] = static_cast<index_t>(
            std::uniform_int_distribution<std::size_t>(0, opts.dims[d] - 1)(rng));
      }
    }
    if (!seen.insert(key).second) continue;
    t.push_back(key, 1.0 - val(rng));
  }
  return canonicalize(t);
}

}  // namespace tenkit
