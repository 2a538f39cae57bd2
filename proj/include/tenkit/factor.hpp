#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace tenkit {

/// Dense row-major rows x rank matrix.
class FactorMatrix {
 public:
  FactorMatrix() = default;
  FactorMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t r) { return data_[i * cols_ + r]; }
  double operator()(std::size_t i, std::size_t r) const { return data_[i * cols_ + r]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  /// Entries drawn uniformly from [0, 1).
  static FactorMatrix random(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    FactorMatrix f(rows, cols);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& x : f.data_) x = u(rng);
    return f;
  }

  friend bool operator==(const FactorMatrix&, const FactorMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Scalar multiply/add tally for one kernel invocation.
struct OpCount {
  std::uint64_t muls = 0;
  std::uint64_t adds = 0;

  std::uint64_t total() const noexcept { return muls + adds; }
  OpCount& operator+=(const OpCount& o) noexcept {
    muls += o.muls;
    adds += o.adds;
    return *this;
  }
  friend OpCount operator+(OpCount a, const OpCount& b) noexcept { return a += b; }
  friend bool operator==(const OpCount&, const OpCount&) = default;
};

}  // namespace tenkit
