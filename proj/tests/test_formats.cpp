#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "tenkit/csf.hpp"
#include "tenkit/hbcsf.hpp"
#include "tenkit/storage.hpp"
#include "test_support.hpp"

using namespace tenkit;
using namespace tenkit::testing;

TEST_CASE("build_csf") {
  SUBCASE("single nonzero") {
    CooTensor t({2, 2, 2});
    t.push_back(std::vector<index_t>{1, 0, 1}, 3.0);
    const auto c = build_csf(t, ModeOrder::identity(3));
    CHECK(c.slices() == 1);
    CHECK(c.fibers() == 1);
    CHECK(c.ptr[0] == std::vector<index_t>{0, 1});
    CHECK(c.ptr[1] == std::vector<index_t>{0, 1});
    CHECK(c.idx[0] == std::vector<index_t>{1});
    CHECK(c.leaf_idx == std::vector<index_t>{1});
    validate(c);
  }
  SUBCASE("empty tensor") {
    const auto c = build_csf(CooTensor({2, 2, 2}), ModeOrder::identity(3));
    CHECK(c.ptr[0] == std::vector<index_t>{0});
    CHECK(c.ptr[1] == std::vector<index_t>{0});
    CHECK(c.idx[0].empty());
    CHECK(c.values.empty());
    validate(c);
  }
  SUBCASE("worked example: S=3, F=5, CSF words 24") {
    const auto c = build_csf(canonicalize(worked_example()), ModeOrder::identity(3));
    CHECK(c.slices() == 3);
    CHECK(c.fibers() == 5);
    CHECK(c.nnz() == 8);
    CHECK(storage_words(c).index_words == 24);
  }
  SUBCASE("flatten equals the sorted COO for random orders 3 and 4") {
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 30; ++rep) {
      const std::size_t order = 3 + rep % 2;
      const auto t = canonicalize(random_tensor(rng, random_dims(rng, order, 10), 100));
      std::vector<std::size_t> p(order);
      std::iota(p.begin(), p.end(), std::size_t{0});
      std::shuffle(p.begin(), p.end(), rng);
      const ModeOrder mo(p);
      const auto c = build_csf(t, mo);
      validate(c);
      CHECK(flatten(c) == sort_by_mode_order(t, mo));
    }
  }
}

TEST_CASE("classify_slices on the worked example") {
  const auto c = build_csf(canonicalize(worked_example()), ModeOrder::identity(3));
  const auto kinds = classify_slices(c);
  REQUIRE(kinds.size() == 3);
  CHECK(kinds[0] == SliceKind::Coo);
  CHECK(kinds[1] == SliceKind::Csl);
  CHECK(kinds[2] == SliceKind::Csf);
}

TEST_CASE("build_hbcsf partitions") {
  SUBCASE("all single-nonzero slices go to COO") {
    CooTensor t({4, 4, 4});
    for (index_t i = 0; i < 4; ++i) t.push_back(std::vector<index_t>{i, 3 - i, i}, 1.0 + i);
    const auto h = build_hbcsf(t, ModeOrder::identity(3));
    CHECK(h.coo_part.nnz() == 4);
    CHECK(h.csl_part.nnz() == 0);
    CHECK(h.csf_part.nnz() == 0);
  }
  SUBCASE("all singleton fibers with >= 2 fibers per slice go to CSL") {
    CooTensor t({3, 3, 3});
    for (index_t i = 0; i < 3; ++i) {
      for (index_t j = 0; j < 3; ++j) t.push_back(std::vector<index_t>{i, j, (i + j) % 3}, 1.0);
    }
    const auto h = build_hbcsf(t, ModeOrder::identity(3));
    CHECK(h.coo_part.nnz() == 0);
    CHECK(h.csl_part.nnz() == 9);
    CHECK(h.csl_part.slices() == 3);
    CHECK(h.csf_part.nnz() == 0);
  }
  SUBCASE("worked example: parts (1, 3, 4) and 19 words") {
    const auto t = canonicalize(worked_example());
    const auto h = build_hbcsf(t, ModeOrder::identity(3));
    CHECK(h.coo_part.nnz() == 1);
    CHECK(h.csl_part.nnz() == 3);
    CHECK(h.csf_part.nnz() == 4);
    CHECK(storage_words(t).index_words == 24);
    const auto rep = storage_words(h);
    CHECK(rep.index_words == 19);
    CHECK(rep.bytes() == 76);
    CHECK(rep.parts[0].words == 3);
    CHECK(rep.parts[1].words == 8);
    CHECK(rep.parts[2].words == 8);
    CHECK(flatten(h) == t);
  }
}

TEST_CASE("HB-CSF invariants on random tensors") {
  std::mt19937_64 rng(99);
  std::size_t outside_band = 0;
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t order = 3 + rep % 2;
    // small leaf dims give CSF slices, large ones give CSL/COO slices
    auto dims = random_dims(rng, order, 12);
    const auto t = canonicalize(random_tensor(rng, dims, 80));
    std::vector<std::size_t> p(order);
    std::iota(p.begin(), p.end(), std::size_t{0});
    std::shuffle(p.begin(), p.end(), rng);
    const ModeOrder mo(p);
    const auto csf = build_csf(t, mo);
    const auto h = build_hbcsf(csf);

    CHECK(flatten(h) == sort_by_mode_order(t, mo));
    validate(h.csf_part);

    // disjoint slice sets and per-part admission rules
    std::set<index_t> coo_s, csl_s, csf_s;
    for (std::size_t x = 0; x < h.coo_part.nnz(); ++x) {
      CHECK(coo_s.insert(h.coo_part.index(x, mo.root())).second);
    }
    for (std::size_t s = 0; s < h.csl_part.slices(); ++s) {
      CHECK(csl_s.insert(h.csl_part.slice_idx[s]).second);
      const auto b = h.csl_part.slice_ptr[s], e = h.csl_part.slice_ptr[s + 1];
      CHECK(e - b >= 2);
      std::set<index_t> mids(h.csl_part.mid_idx().begin() + b, h.csl_part.mid_idx().begin() + e);
      CHECK(mids.size() == e - b);
    }
    for (std::size_t s = 0; s < h.csf_part.slices(); ++s) {
      csf_s.insert(h.csf_part.idx[0][s]);
      const auto [nb, ne] = h.csf_part.descend(0, s, order - 1);
      const auto [cb, ce] = h.csf_part.descend(0, s, 1);
      CHECK(ce - cb < ne - nb);  // some level-1 node holds >= 2 nonzeros
    }
    for (auto i : coo_s) CHECK((csl_s.count(i) + csf_s.count(i)) == 0);
    for (auto i : csl_s) CHECK(csf_s.count(i) == 0);

    const auto kinds = classify_slices(csf);
    CHECK(kinds.size() == coo_s.size() + csl_s.size() + csf_s.size());

    const auto w_coo = storage_words(t).index_words;
    const auto w_csf = storage_words(csf).index_words;
    const auto w_hb = storage_words(h).index_words;
    CHECK(w_coo == order * t.nnz());
    CHECK(w_hb <= w_csf);
    CHECK(w_hb >= t.nnz());
    // CSF is no larger than COO exactly when its pointer/index overhead is
    std::size_t overhead = 0;
    for (std::size_t d = 0; d + 1 < order; ++d) overhead += 2 * csf.level_size(d);
    CHECK((w_csf <= w_coo) == (overhead <= (order - 1) * t.nnz()));
    if (order == 3 && (w_hb > 3 * t.nnz())) ++outside_band;
  }
  MESSAGE("order-3 tensors above the 3M-word band: " << outside_band);
}

TEST_CASE("storage report serialises to JSON") {
  const auto h = build_hbcsf(canonicalize(worked_example()), ModeOrder::identity(3));
  const nlohmann::json j = storage_words(h);
  CHECK(j["format"] == "HB-CSF");
  CHECK(j["index_words"] == 19);
  CHECK(j["bytes"] == 76);
  REQUIRE(j["parts"].size() == 3);
  CHECK(j["parts"][1]["label"] == "CSL");
  CHECK(j["parts"][1]["slices"] == 1);
  CHECK(j["parts"][1]["nnz"] == 3);
}
