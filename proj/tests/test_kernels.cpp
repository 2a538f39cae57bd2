#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "tenkit/balance.hpp"
#include "tenkit/errors.hpp"
#include "tenkit/kernels.hpp"
#include "test_support.hpp"

using namespace tenkit;
using namespace tenkit::testing;

namespace {

FactorMatrix matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> vals) {
  FactorMatrix f(rows, cols);
  std::copy(vals.begin(), vals.end(), f.data().begin());
  return f;
}

std::size_t csf_expected_total(const CsfTensor& c, std::size_t rank) {
  const std::size_t n = c.order();
  std::size_t muls = c.nnz(), adds = c.nnz();
  for (std::size_t d = 1; d + 1 < n; ++d) muls += c.level_size(d);
  for (std::size_t d = 0; d + 2 < n; ++d) adds += c.level_size(d);
  return (muls + adds) * rank;
}

}  // namespace

TEST_CASE("mttkrp_coo hand cases") {
  SUBCASE("single nonzero") {
    CooTensor t({1, 1, 1});
    t.push_back(std::vector<index_t>{0, 0, 0}, 2.0);
    std::vector<FactorMatrix> f{FactorMatrix(1, 1), matrix(1, 1, {3.0}), matrix(1, 1, {5.0})};
    const auto r = mttkrp_coo(t, f, 0);
    CHECK(r.output(0, 0) == 30.0);
    CHECK(r.ops.total() == 3);
  }
  SUBCASE("factors of ones collapse to slice sums") {
    std::mt19937_64 rng(1);
    const auto t = canonicalize(random_tensor(rng, {6, 5, 4}, 40));
    for (std::size_t mode = 0; mode < 3; ++mode) {
      std::vector<FactorMatrix> f;
      for (auto d : t.dims()) f.emplace_back(d, 3, 1.0);
      const auto r = mttkrp_coo(t, f, mode);
      std::vector<double> sums(t.dim(mode), 0.0);
      for (std::size_t x = 0; x < t.nnz(); ++x) sums[t.index(x, mode)] += t.value(x);
      for (std::size_t i = 0; i < sums.size(); ++i) {
        for (std::size_t c = 0; c < 3; ++c) CHECK(r.output(i, c) == doctest::Approx(sums[i]));
      }
    }
  }
  SUBCASE("random 30-nnz, R=4 agrees with the dense oracle; 360 ops") {
    std::mt19937_64 rng(2);
    const auto t = canonicalize(random_tensor(rng, {5, 6, 7}, 30));
    const auto f = random_factors(rng, t.dims(), 4);
    const auto r = mttkrp_coo(t, f, 0);
    CHECK(max_row_relative_deviation(r.output, mttkrp_dense_oracle(t, f, 0)) <= 1e-12);
    CHECK(r.ops.total() == 360);
    CHECK(r.ops.muls == 240);
    CHECK(r.ops.adds == 120);
  }
  SUBCASE("shape errors") {
    CooTensor t({2, 2, 2});
    std::vector<FactorMatrix> f{FactorMatrix(2, 2), FactorMatrix(3, 2), FactorMatrix(2, 2)};
    CHECK_THROWS_AS(mttkrp_coo(t, f, 0), ArgumentError);
    f[1] = FactorMatrix(2, 3);
    CHECK_THROWS_AS(mttkrp_coo(t, f, 0), ArgumentError);
    f[1] = FactorMatrix(2, 2);
    CHECK_THROWS_AS(mttkrp_coo(t, f, 3), ArgumentError);
  }
}

TEST_CASE("mttkrp_csf hand cases and operation counts") {
  SUBCASE("one slice, one fiber, values (2, 3)") {
    CooTensor t({1, 1, 2});
    t.push_back(std::vector<index_t>{0, 0, 0}, 2.0);
    t.push_back(std::vector<index_t>{0, 0, 1}, 3.0);
    std::vector<FactorMatrix> f{FactorMatrix(1, 1, 1.0), FactorMatrix(1, 1, 1.0),
                                FactorMatrix(2, 1, 1.0)};
    const auto r = mttkrp_csf(build_csf(t, ModeOrder::identity(3)), f, 0);
    CHECK(r.output(0, 0) == 5.0);
    CHECK(r.ops.total() == 6);
  }
  SUBCASE("S = F = M gives 4MR") {
    CooTensor t({6, 6, 6});
    for (index_t i = 0; i < 6; ++i) t.push_back(std::vector<index_t>{i, (i * 5) % 6, i}, 1.0);
    std::mt19937_64 rng(3);
    const auto f = random_factors(rng, t.dims(), 8);
    const auto r = mttkrp_csf(build_csf(t, ModeOrder::identity(3)), f, 0);
    CHECK(r.ops.total() == 4 * 6 * 8);
  }
  SUBCASE("one slice, one fiber gives 2MR + 2R") {
    const std::size_t m = 50, rank = 4;
    CooTensor t({1, 1, m});
    for (index_t k = 0; k < m; ++k) t.push_back(std::vector<index_t>{0, 0, k}, 1.0 + k);
    std::mt19937_64 rng(4);
    const auto f = random_factors(rng, t.dims(), rank);
    const auto r = mttkrp_csf(build_csf(t, ModeOrder::identity(3)), f, 0);
    CHECK(r.ops.total() == 2 * m * rank + 2 * rank);
  }
  SUBCASE("wrong root mode") {
    CooTensor t({2, 2, 2});
    t.push_back(std::vector<index_t>{0, 0, 0}, 1.0);
    std::vector<FactorMatrix> f(3, FactorMatrix(2, 1, 1.0));
    CHECK_THROWS_AS(mttkrp_csf(build_csf(t, ModeOrder::identity(3)), f, 1), ArgumentError);
  }
}

TEST_CASE("mttkrp_csl hand cases") {
  CooTensor t({1, 2, 2});
  t.push_back(std::vector<index_t>{0, 0, 0}, 2.0);
  t.push_back(std::vector<index_t>{0, 1, 1}, 3.0);
  const auto h = build_hbcsf(t, ModeOrder::identity(3));
  REQUIRE(h.csl_part.nnz() == 2);
  SUBCASE("two-term expansion") {
    std::vector<FactorMatrix> f{FactorMatrix(1, 1), matrix(2, 1, {1.0, 10.0}),
                                matrix(2, 1, {1.0, 100.0})};
    FactorMatrix out(1, 1);
    const auto ops = mttkrp_csl(h.csl_part, f, 0, out);
    CHECK(out(0, 0) == 3002.0);
    CHECK(ops.total() == 3 * 2 * 1);
  }
  SUBCASE("ones give the slice sum") {
    std::vector<FactorMatrix> f{FactorMatrix(1, 2), FactorMatrix(2, 2, 1.0),
                                FactorMatrix(2, 2, 1.0)};
    FactorMatrix out(1, 2);
    mttkrp_csl(h.csl_part, f, 0, out);
    CHECK(out(0, 0) == 5.0);
    CHECK(out(0, 1) == 5.0);
  }
}

TEST_CASE("mttkrp_hbcsf") {
  std::mt19937_64 rng(5);
  SUBCASE("all-COO partition matches COO exactly") {
    CooTensor t({5, 5, 5});
    for (index_t i = 0; i < 5; ++i) t.push_back(std::vector<index_t>{i, i, 4 - i}, 0.5 + i);
    const auto f = random_factors(rng, t.dims(), 3);
    const auto h = build_hbcsf(t, ModeOrder::identity(3));
    const auto a = mttkrp_hbcsf(h, f, 0);
    const auto b = mttkrp_coo(t, f, 0);
    CHECK(a.output == b.output);
    CHECK(a.ops == b.ops);
  }
  SUBCASE("all-CSL partition costs exactly 3MR") {
    CooTensor t({4, 4, 4});
    for (index_t i = 0; i < 4; ++i) {
      for (index_t j = 0; j < 3; ++j) t.push_back(std::vector<index_t>{i, j, (i + j) % 4}, 1.0);
    }
    const auto f = random_factors(rng, t.dims(), 8);
    const auto h = build_hbcsf(t, ModeOrder::identity(3));
    REQUIRE(h.csl_part.nnz() == t.nnz());
    CHECK(mttkrp_hbcsf(h, f, 0).ops.total() == 3 * t.nnz() * 8);
  }
  SUBCASE("mixed random tensors agree with the oracle") {
    for (int rep = 0; rep < 20; ++rep) {
      const auto t = canonicalize(random_tensor(rng, random_dims(rng, 3, 10), 120));
      const auto f = random_factors(rng, t.dims(), 5);
      for (std::size_t mode = 0; mode < 3; ++mode) {
        const auto h = build_hbcsf(t, ModeOrder::for_mode(mode, t.dims()));
        const auto r = mttkrp_hbcsf(h, f, mode);
        CHECK(max_row_relative_deviation(r.output, mttkrp_dense_oracle(t, f, mode)) <= 1e-10);
        const std::size_t m = t.nnz();
        const std::size_t fs = h.csf_part.fibers() + h.csf_part.slices();
        CHECK(r.ops.total() >= 2 * m * 5);
        CHECK(r.ops.total() <= (3 * m + fs) * 5);
      }
    }
  }
}

TEST_CASE("mttkrp_dense_oracle") {
  SUBCASE("1x1x1, R=2") {
    CooTensor t({1, 1, 1});
    t.push_back(std::vector<index_t>{0, 0, 0}, 2.0);
    std::vector<FactorMatrix> f{FactorMatrix(1, 2), matrix(1, 2, {3.0, 5.0}),
                                matrix(1, 2, {7.0, 11.0})};
    const auto y = mttkrp_dense_oracle(t, f, 0);
    CHECK(y(0, 0) == 42.0);
    CHECK(y(0, 1) == 110.0);
  }
  SUBCASE("zero tensor") {
    CooTensor t({3, 4, 5});
    std::mt19937_64 rng(6);
    const auto f = random_factors(rng, t.dims(), 2);
    const auto y = mttkrp_dense_oracle(t, f, 1);
    for (double v : y.data()) CHECK(v == 0.0);
  }
  SUBCASE("capacity ceiling") {
    CooTensor t({2, 1000, 1000});
    std::vector<FactorMatrix> f{FactorMatrix(2, 32), FactorMatrix(1000, 32),
                                FactorMatrix(1000, 32)};
    CHECK_THROWS_AS(mttkrp_dense_oracle(t, f, 0), CapacityError);
  }
}

TEST_CASE("every kernel agrees with the dense oracle (orders 3 and 4)") {
  std::mt19937_64 rng(8);
  const SplitConfig cfg{2, 4, 2};
  for (int rep = 0; rep < 24; ++rep) {
    const std::size_t order = 3 + rep % 2;
    const std::size_t rank = std::vector<std::size_t>{1, 2, 8, 32}[rep % 4];
    const auto dims = random_dims(rng, order, order == 3 ? 20 : 9);
    const auto t = canonicalize(random_tensor(rng, dims, 300));
    const auto f = random_factors(rng, dims, rank);
    for (std::size_t mode = 0; mode < order; ++mode) {
      const auto ref = mttkrp_dense_oracle(t, f, mode);
      const auto mo = ModeOrder::for_mode(mode, dims);
      const auto csf = build_csf(t, mo);
      const auto split = split_fibers(csf, cfg);
      const auto sched = assign_slice_blocks(split, cfg);
      const auto coo = mttkrp_coo(t, f, mode);
      const auto c = mttkrp_csf(csf, f, mode);
      const auto h = mttkrp_hbcsf(build_hbcsf(csf), f, mode);
      const auto b = mttkrp_bcsf(split, sched, f, mode);
      CHECK(max_row_relative_deviation(coo.output, ref) <= 1e-10);
      CHECK(max_row_relative_deviation(c.output, ref) <= 1e-10);
      CHECK(max_row_relative_deviation(h.output, ref) <= 1e-10);
      CHECK(max_row_relative_deviation(b.output, ref) <= 1e-10);
      CHECK(coo.ops.total() == order * t.nnz() * rank);
      CHECK(c.ops.total() == csf_expected_total(csf, rank));
    }
  }
}

TEST_CASE("linearity and entry-order invariance") {
  std::mt19937_64 rng(9);
  const auto t = canonicalize(random_tensor(rng, {9, 8, 7}, 150));
  const auto f = random_factors(rng, t.dims(), 6);
  auto t2 = t;
  t2.scale(2.0);
  for (std::size_t mode = 0; mode < 3; ++mode) {
    const auto a = mttkrp_coo(t, f, mode).output;
    const auto b = mttkrp_coo(t2, f, mode).output;
    for (std::size_t i = 0; i < a.data().size(); ++i) CHECK(b.data()[i] == 2.0 * a.data()[i]);
    const auto mo = ModeOrder::for_mode(mode, t.dims());
    const auto c = mttkrp_csf(build_csf(t, mo), f, mode).output;
    const auto d = mttkrp_csf(build_csf(t2, mo), f, mode).output;
    for (std::size_t i = 0; i < c.data().size(); ++i) CHECK(d.data()[i] == 2.0 * c.data()[i]);
  }

  // shuffle the entry order
  std::vector<std::size_t> perm(t.nnz());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  CooTensor shuffled(t.dims());
  std::vector<index_t> idx(3);
  for (auto x : perm) {
    for (std::size_t d = 0; d < 3; ++d) idx[d] = t.index(x, d);
    shuffled.push_back(idx, t.value(x));
  }
  const auto base = mttkrp_coo(t, f, 0).output;
  const auto seq = mttkrp_coo(shuffled, f, 0).output;
  CHECK(max_row_relative_deviation(seq, base) <= 1e-15);
  const auto par = mttkrp_coo(shuffled, f, 0, {true, 4}).output;
  CHECK(max_row_relative_deviation(par, base) <= 1e-10);
}

TEST_CASE("parallel kernels match sequential") {
  std::mt19937_64 rng(10);
  const auto t = canonicalize(random_tensor(rng, {30, 25, 20}, 2000));
  const auto f = random_factors(rng, t.dims(), 16);
  const ExecOptions par{true, 4};
  const SplitConfig cfg{4, 16, 4};
  for (std::size_t mode = 0; mode < 3; ++mode) {
    const auto mo = ModeOrder::for_mode(mode, t.dims());
    const auto csf = build_csf(t, mo);
    const auto split = split_fibers(csf, cfg);
    const auto sched = assign_slice_blocks(split, cfg);
    const auto ref = mttkrp_csf(csf, f, mode).output;
    CHECK(max_row_relative_deviation(mttkrp_csf(csf, f, mode, par).output, ref) <= 1e-10);
    CHECK(max_row_relative_deviation(mttkrp_coo(t, f, mode, par).output, ref) <= 1e-10);
    CHECK(max_row_relative_deviation(mttkrp_hbcsf(build_hbcsf(csf), f, mode, par).output, ref) <=
          1e-10);
    const auto b = mttkrp_bcsf(split, sched, f, mode, par);
    CHECK(max_row_relative_deviation(b.output, ref) <= 1e-10);
    CHECK(b.ops == mttkrp_bcsf(split, sched, f, mode).ops);
  }
}
