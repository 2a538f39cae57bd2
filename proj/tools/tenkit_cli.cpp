// tenkit command-line driver.
//
// Exit codes: 0 ok, 2 bad arguments, 3 bad data (I/O, parse, numerical),
// 4 a requested check failed.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <nlohmann/json.hpp>

#include "tenkit/balance.hpp"
#include "tenkit/coo.hpp"
#include "tenkit/cpd.hpp"
#include "tenkit/csf.hpp"
#include "tenkit/errors.hpp"
#include "tenkit/frostt.hpp"
#include "tenkit/generate.hpp"
#include "tenkit/hbcsf.hpp"
#include "tenkit/kernels.hpp"
#include "tenkit/representation.hpp"
#include "tenkit/sched_sim.hpp"
#include "tenkit/stats.hpp"
#include "tenkit/storage.hpp"

using json = nlohmann::json;
using namespace tenkit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitArgs = 2;
constexpr int kExitData = 3;
constexpr int kExitCheck = 4;

constexpr int kTimedReps = 5;

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// --seed wins, then TENKIT_SEED, then 0.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  const char* env = std::getenv("TENKIT_SEED");
  if (!env || !*env) return 0;
  std::uint64_t v = 0;
  const std::string_view s(env);
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw ArgumentError(fmt::format("TENKIT_SEED must be an unsigned integer, got '{}'", s));
  return v;
}

ExecOptions exec_for(int threads) {
  if (threads < 0) throw ArgumentError("--threads must be >= 0");
  return {.parallel = threads != 1, .threads = threads};
}

CooTensor load(const std::string& path) { return canonicalize(read_frostt(path)); }

std::string tensor_id(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

std::vector<std::size_t> parse_size_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  std::string tok;
  std::string norm = text;
  std::replace(norm.begin(), norm.end(), 'x', ',');
  std::istringstream ss(norm);
  while (std::getline(ss, tok, ',')) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc{} || p != tok.data() + tok.size())
      throw ArgumentError(fmt::format("{}: '{}' is not a nonnegative integer", what, tok));
    out.push_back(v);
  }
  if (out.empty()) throw ArgumentError(fmt::format("{}: empty list", what));
  return out;
}

std::vector<std::size_t> parse_thresholds(const std::string& text) {
  std::vector<std::size_t> out;
  std::istringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok == "inf" || tok == "none") {
      out.push_back(kNoSplit);
      continue;
    }
    const auto v = parse_size_list(tok, "--thresholds");
    if (v.front() == 0) throw ArgumentError("--thresholds: 0 is not a valid threshold");
    out.push_back(v.front());
  }
  if (out.empty()) throw ArgumentError("--thresholds: empty list");
  return out;
}

std::string threshold_label(std::size_t t) { return t == kNoSplit ? "inf" : std::to_string(t); }

void check_mode(const CooTensor& t, std::size_t mode) {
  if (mode >= t.order())
    throw ArgumentError(fmt::format("--mode {} out of range for an order-{} tensor", mode, t.order()));
}

std::vector<FactorMatrix> random_factors(const CooTensor& t, std::size_t rank, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<FactorMatrix> f;
  for (auto d : t.dims()) f.push_back(FactorMatrix::random(d, rank, rng));
  return f;
}

json dist_json(const Distribution& d) {
  return {{"count", d.count}, {"max", d.max}, {"mean", d.mean}, {"stddev", d.stddev}};
}

// ---------------------------------------------------------------- inspect

struct InspectArgs {
  std::string path;
  std::string mode_order;
  std::size_t fiber_threshold = 128;
  bool json = false;
};

int run_inspect(const InspectArgs& a) {
  const auto t = load(a.path);
  std::vector<ModeOrder> orders;
  if (!a.mode_order.empty()) {
    orders.emplace_back(parse_size_list(a.mode_order, "--mode-order"));
    if (orders.back().size() != t.order())
      throw ArgumentError(fmt::format("--mode-order has {} modes, tensor has {}",
                                      orders.back().size(), t.order()));
  } else {
    for (std::size_t m = 0; m < t.order(); ++m) orders.push_back(ModeOrder::for_mode(m, t.dims()));
  }
  const SplitConfig cfg{.fiber_threshold = a.fiber_threshold};
  cfg.validate();

  json out;
  const auto base = compute_stats(t, ModeOrder::identity(t.order()));
  out["command"] = "inspect";
  out["tensor"] = tensor_id(a.path);
  out["order"] = base.order;
  out["dims"] = base.dims;
  out["nnz"] = base.nnz;
  out["density"] = base.density;
  out["mode_orders"] = json::array();

  for (const auto& order : orders) {
    const auto st = compute_stats(t, order);
    const auto csf = build_csf(t, order);
    const auto hb = build_hbcsf(csf);
    const auto split = split_fibers(csf, cfg);
    std::size_t census[3] = {0, 0, 0};
    for (auto k : classify_slices(csf)) ++census[static_cast<int>(k)];

    json j;
    j["root_mode"] = order.root();
    j["mode_order"] = order.levels();
    j["slices"] = st.per_order.slices;
    j["fibers"] = st.per_order.fibers;
    j["nnz_per_slice"] = dist_json(st.per_order.nnz_per_slice);
    j["nnz_per_fiber"] = dist_json(st.per_order.nnz_per_fiber);
    j["storage"] = {{"coo", storage_words(t)},
                    {"csf", storage_words(csf)},
                    {"bcsf", storage_words(split)},
                    {"hbcsf", storage_words(hb)}};
    j["slice_census"] = {{"coo", census[0]}, {"csl", census[1]}, {"csf", census[2]}};
    out["mode_orders"].push_back(std::move(j));
  }

  if (a.json) {
    std::cout << out.dump(2) << '\n';
    return kExitOk;
  }
  fmt::print("tensor   {}\norder    {}\ndims     {}\nnnz      {}\ndensity  {:.6g}\n", out["tensor"].get<std::string>(),
             base.order, fmt::join(base.dims, "x"), base.nnz, base.density);
  for (const auto& j : out["mode_orders"]) {
    const auto& s = j["storage"];
    fmt::print("\nmode order {}  (root mode {})\n", fmt::join(j["mode_order"].get<std::vector<std::size_t>>(), ","),
               j["root_mode"].get<std::size_t>());
    fmt::print("  slices {}  fibers {}\n", j["slices"].get<std::size_t>(), j["fibers"].get<std::size_t>());
    for (const char* k : {"nnz_per_slice", "nnz_per_fiber"}) {
      const auto& d = j[k];
      fmt::print("  {:<14} max {}  mean {:.4g}  stddev {:.4g}\n", k, d["max"].get<std::size_t>(),
                 d["mean"].get<double>(), d["stddev"].get<double>());
    }
    fmt::print("  index words    COO {}  CSF {}  B-CSF {}  HB-CSF {}\n", s["coo"]["index_words"].get<std::size_t>(),
               s["csf"]["index_words"].get<std::size_t>(), s["bcsf"]["index_words"].get<std::size_t>(),
               s["hbcsf"]["index_words"].get<std::size_t>());
    const auto& c = j["slice_census"];
    fmt::print("  slice census   COO {}  CSL {}  CSF {}\n", c["coo"].get<std::size_t>(), c["csl"].get<std::size_t>(),
               c["csf"].get<std::size_t>());
  }
  return kExitOk;
}

// ---------------------------------------------------------------- convert

struct ConvertArgs {
  std::string path;
  std::string format = "hbcsf";
  std::optional<std::size_t> mode;
  std::size_t fiber_threshold = 128;
  std::string out;
  bool json = false;
};

// Builds the requested format, flattens it back and checks that no nonzero
// was lost or altered; optionally writes the canonical tensor.
int run_convert(const ConvertArgs& a) {
  const Format fmt_ = parse_format(a.format);
  const auto t = load(a.path);
  if (a.mode) check_mode(t, *a.mode);
  const SplitConfig cfg{.fiber_threshold = a.fiber_threshold};
  cfg.validate();

  json out = {{"command", "convert"}, {"tensor", tensor_id(a.path)}, {"format", to_string(fmt_)},
              {"nnz", t.nnz()}, {"modes", json::array()}};
  bool all_ok = true;
  for (std::size_t m = 0; m < t.order(); ++m) {
    if (a.mode && *a.mode != m) continue;
    const auto t0 = Clock::now();
    const auto rep = build_representation(t, fmt_, m, cfg);
    const double build_s = seconds_since(t0);
    CooTensor back = t;
    if (rep.csf) back = flatten(*rep.csf);
    if (rep.hbcsf) back = flatten(*rep.hbcsf);
    const bool ok = canonicalize(back) == t;
    all_ok = all_ok && ok;
    out["modes"].push_back({{"mode", m},
                            {"build_seconds", build_s},
                            {"storage", rep.storage(t)},
                            {"round_trip", ok}});
  }
  if (!a.out.empty()) {
    write_frostt(a.out, t);
    out["written"] = a.out;
  }

  if (a.json) {
    std::cout << out.dump(2) << '\n';
  } else {
    for (const auto& j : out["modes"]) {
      fmt::print("mode {}  {}  index words {}  build {:.3g}s  round trip {}\n", j["mode"].get<std::size_t>(),
                 j["storage"]["format"].get<std::string>(), j["storage"]["index_words"].get<std::size_t>(),
                 j["build_seconds"].get<double>(), j["round_trip"].get<bool>() ? "ok" : "FAILED");
    }
    if (!a.out.empty()) fmt::print("wrote {}\n", a.out);
  }
  return all_ok ? kExitOk : kExitCheck;
}

// ---------------------------------------------------------------- mttkrp

struct MttkrpArgs {
  std::string path;
  std::string format = "hbcsf";
  std::size_t mode = 0;
  std::size_t rank = 32;
  int threads = 1;
  std::size_t fiber_threshold = 128;
  std::optional<std::uint64_t> seed;
  std::string baseline;
  bool check = false;
  double check_tol = 1e-8;
  bool json = false;
};

struct Timed {
  double preprocessing_seconds = 0;
  double wall_seconds = 0;
  MttkrpResult result;
};

Timed time_format(const CooTensor& t, Format f, std::size_t mode, const SplitConfig& cfg,
                  const std::vector<FactorMatrix>& factors, const ExecOptions& exec) {
  Timed out;
  const auto t0 = Clock::now();
  const auto rep = build_representation(t, f, mode, cfg);
  out.preprocessing_seconds = seconds_since(t0);
  out.result = mttkrp(rep, t, factors, exec);  // warm-up
  std::vector<double> walls;
  for (int r = 0; r < kTimedReps; ++r) {
    const auto t1 = Clock::now();
    out.result = mttkrp(rep, t, factors, exec);
    walls.push_back(seconds_since(t1));
  }
  out.wall_seconds = median(walls);
  return out;
}

int run_mttkrp(const MttkrpArgs& a) {
  const Format f = parse_format(a.format);
  const auto exec = exec_for(a.threads);
  const std::uint64_t seed = resolve_seed(a.seed);
  if (a.rank == 0) throw ArgumentError("--rank must be >= 1");
  if (!(a.check_tol >= 0)) throw ArgumentError("--check-tol must be >= 0");
  const SplitConfig cfg{.fiber_threshold = a.fiber_threshold};
  cfg.validate();
  std::optional<Format> base_f;
  if (!a.baseline.empty()) base_f = parse_format(a.baseline);

  const auto t = load(a.path);
  check_mode(t, a.mode);
  const auto factors = random_factors(t, a.rank, seed);

  const auto run = time_format(t, f, a.mode, cfg, factors, exec);
  const auto& ops = run.result.ops;
  const double gflops = run.wall_seconds > 0 ? static_cast<double>(ops.total()) / run.wall_seconds / 1e9 : 0.0;
  double checksum = 0;
  for (double x : run.result.output.data()) checksum += x;

  json rec = {{"command", "mttkrp"},
              {"tensor", tensor_id(a.path)},
              {"format", to_string(f)},
              {"mode", a.mode},
              {"R", a.rank},
              {"seed", seed},
              {"threads", a.threads},
              {"fiber_threshold", a.fiber_threshold},
              {"wall_seconds", run.wall_seconds},
              {"op_count", ops.total()},
              {"muls", ops.muls},
              {"adds", ops.adds},
              {"gflops", gflops},
              {"gflops_basis", "instrumented multiplies + adds per kernel call"},
              {"timing", "median of 5 runs after 1 warm-up"},
              {"preprocessing_seconds", run.preprocessing_seconds},
              {"iterations_to_amortize", nullptr},
              {"checksum", checksum}};

  if (t.order() == 3) {
    // the two order-3 CSF operation-count conventions, for comparison
    const auto st = compute_stats(t, ModeOrder::for_mode(a.mode, t.dims())).per_order;
    const std::size_t S = st.slices, F = st.fibers, M = t.nnz(), R = a.rank;
    rec["csf_op_conventions"] = {{"2M+F+S", (2 * M + F + S) * R}, {"2(S+M)", 2 * (S + M) * R}};
  }

  if (base_f) {
    const auto base = time_format(t, *base_f, a.mode, cfg, factors, exec);
    rec["baseline"] = {{"format", to_string(*base_f)},
                       {"wall_seconds", base.wall_seconds},
                       {"preprocessing_seconds", base.preprocessing_seconds}};
    const double per_iter = base.wall_seconds - run.wall_seconds;
    const double extra_pre = run.preprocessing_seconds - base.preprocessing_seconds;
    // Absent when the format is not faster per call: it never catches up.
    if (per_iter > 0) rec["iterations_to_amortize"] = extra_pre <= 0 ? 0.0 : std::ceil(extra_pre / per_iter);
  }

  bool failed = false;
  if (a.check) {
    const auto ref = mttkrp_coo(t, factors, a.mode);
    const double dev = max_row_relative_deviation(run.result.output, ref.output);
    failed = !(dev <= a.check_tol);
    rec["check"] = {{"reference", "coo"}, {"max_relative_deviation", dev},
                    {"tolerance", a.check_tol}, {"passed", !failed}};
  }

  if (a.json) {
    std::cout << rec.dump(2) << '\n';
  } else {
    fmt::print("tensor                 {}\nformat                 {}\nmode                   {}\nR                      {}\n",
               rec["tensor"].get<std::string>(), to_string(f), a.mode, a.rank);
    fmt::print("preprocessing_seconds  {:.6g}\nwall_seconds           {:.6g}\nop_count               {}\n",
               run.preprocessing_seconds, run.wall_seconds, ops.total());
    fmt::print("gflops                 {:.6g}\nchecksum               {:.17g}\n", gflops, checksum);
    if (base_f) {
      const auto& it = rec["iterations_to_amortize"];
      fmt::print("iterations_to_amortize {}  (vs {})\n", it.is_null() ? "never" : fmt::format("{}", it.get<double>()),
                 to_string(*base_f));
    }
    if (a.check) {
      fmt::print("check                  max relative deviation {:.3e} ({})\n",
                 rec["check"]["max_relative_deviation"].get<double>(), failed ? "FAILED" : "ok");
    }
  }
  return failed ? kExitCheck : kExitOk;
}

// ---------------------------------------------------------------- cpd

struct CpdArgs {
  std::string path;
  std::size_t rank = 32;
  std::size_t iters = 50;
  double tol = 1e-5;
  std::string format = "hbcsf";
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::size_t fiber_threshold = 128;
  std::string out;
  bool json = false;
};

void write_fit_csv(std::ostream& os, const CpAlsResult& r, std::size_t order) {
  os << "iteration,fit,delta";
  for (std::size_t m = 0; m < order; ++m) os << ",mttkrp_seconds_mode" << m;
  os << ",muls,adds\n";
  for (const auto& h : r.history) {
    os << fmt::format("{},{:.17g},{:.17g}", h.iteration, h.fit, h.delta);
    for (std::size_t m = 0; m < order; ++m)
      os << fmt::format(",{:.6g}", m < h.mttkrp_seconds.size() ? h.mttkrp_seconds[m] : 0.0);
    os << ',' << h.ops.muls << ',' << h.ops.adds << '\n';
  }
}

int run_cpd(const CpdArgs& a) {
  const Format f = parse_format(a.format);
  if (a.rank == 0) throw ArgumentError("--rank must be >= 1");
  if (!(a.tol >= 0)) throw ArgumentError("--tol must be >= 0");
  const SplitConfig cfg{.fiber_threshold = a.fiber_threshold};
  cfg.validate();
  const CpAlsOptions opts{.rank = a.rank, .max_iters = a.iters, .fit_tol = a.tol,
                          .seed = resolve_seed(a.seed), .exec = exec_for(a.threads)};

  auto t = load(a.path);
  if (t.nnz() == 0) throw DataError(a.path + ": tensor has no nonzeros");
  const AllModeTensor at(std::move(t), f, cfg);
  CpAlsResult res;
  try {
    res = cp_als(at, opts);
  } catch (const NumericalError& e) {
    throw DataError(fmt::format("cpd failed at iteration {}: {}", e.iteration(), e.what()));
  }
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';

  if (!a.out.empty()) {
    std::ofstream os(a.out);
    if (!os) throw DataError("cannot write '" + a.out + "'");
    write_fit_csv(os, res, at.order());
  }

  std::vector<std::vector<double>> col_norms;
  for (const auto& fm : res.model.factors) {
    std::vector<double> n(fm.cols(), 0.0);
    for (std::size_t i = 0; i < fm.rows(); ++i)
      for (std::size_t r = 0; r < fm.cols(); ++r) n[r] += fm(i, r) * fm(i, r);
    for (auto& x : n) x = std::sqrt(x);
    col_norms.push_back(std::move(n));
  }

  if (a.json) {
    json hist = json::array();
    for (const auto& h : res.history) {
      hist.push_back({{"iteration", h.iteration}, {"fit", h.fit}, {"delta", h.delta},
                      {"mttkrp_seconds", h.mttkrp_seconds}, {"muls", h.ops.muls}, {"adds", h.ops.adds}});
    }
    json out = {{"command", "cpd"},
                {"tensor", tensor_id(a.path)},
                {"format", to_string(f)},
                {"rank", a.rank},
                {"seed", opts.seed},
                {"iterations", res.history.back().iteration},
                {"final_fit", res.history.back().fit},
                {"history", hist},
                {"lambda", res.model.lambda},
                {"factor_column_norms", col_norms},
                {"warnings", res.warnings}};
    std::cout << out.dump(2) << '\n';
  } else {
    if (a.out.empty()) write_fit_csv(std::cout, res, at.order());
    std::cerr << fmt::format("final fit {:.10f} after {} iterations\nlambda {:.6g}\n", res.history.back().fit,
                             res.history.back().iteration, fmt::join(res.model.lambda, " "));
  }
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string path;
  std::size_t mode = 0;
  std::string thresholds = "inf,1024,128,32";
  std::size_t sms = 56;
  std::size_t block_size = 512;
  std::size_t warp_size = 32;
  std::size_t blocks_per_sm = 1;
  std::string out;
  bool json = false;
};

int run_simulate(const SimulateArgs& a) {
  const auto thresholds = parse_thresholds(a.thresholds);
  SplitConfig cfg{.block_size = a.block_size, .warp_size = a.warp_size};
  cfg.validate();
  const MachineModel machine{.num_sms = a.sms, .warps_per_block = a.block_size / a.warp_size,
                             .warp_size = a.warp_size, .blocks_per_sm = a.blocks_per_sm};
  machine.validate();

  const auto t = load(a.path);
  check_mode(t, a.mode);
  const auto csf = build_csf(t, ModeOrder::for_mode(a.mode, t.dims()));
  const auto rows = sweep_split(csf, thresholds, machine, cfg);

  std::ostringstream csv;
  csv << "threshold,makespan,sm_efficiency_proxy,occupancy_proxy,stddev_fbr,stddev_slc\n";
  for (const auto& r : rows) {
    csv << fmt::format("{},{},{:.6f},{:.6f},{:.6f},{:.6f}\n", threshold_label(r.threshold), r.report.makespan_cycles,
                       r.report.sm_efficiency_proxy, r.report.occupancy_proxy, r.metrics.nnz_per_fiber.stddev,
                       r.metrics.nnz_per_slice.stddev);
  }
  if (!a.out.empty()) {
    std::ofstream os(a.out);
    if (!os) throw DataError("cannot write '" + a.out + "'");
    os << csv.str();
  }

  if (a.json) {
    json out = {{"command", "simulate"},
                {"tensor", tensor_id(a.path)},
                {"mode", a.mode},
                {"machine", {{"num_sms", machine.num_sms}, {"warps_per_block", machine.warps_per_block},
                             {"warp_size", machine.warp_size}, {"blocks_per_sm", machine.blocks_per_sm}}},
                {"note", "makespan, sm_efficiency_proxy and occupancy_proxy are cost-model quantities"},
                {"rows", json::array()}};
    for (const auto& r : rows) {
      out["rows"].push_back({{"threshold", r.threshold == kNoSplit ? json(nullptr) : json(r.threshold)},
                             {"makespan", r.report.makespan_cycles},
                             {"sm_efficiency_proxy", r.report.sm_efficiency_proxy},
                             {"occupancy_proxy", r.report.occupancy_proxy},
                             {"total_work_cycles", r.report.total_work_cycles},
                             {"blocks", r.report.per_block_cycles.size()},
                             {"imbalance", r.metrics}});
    }
    std::cout << out.dump(2) << '\n';
  } else if (a.out.empty()) {
    std::cout << csv.str();
  }
  return kExitOk;
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  std::string shape;
  std::size_t nnz = 0;
  double skew = 0.0;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool json = false;
};

int run_gen(const GenArgs& a) {
  GenOptions o{.dims = parse_size_list(a.shape, "--shape"), .nnz = a.nnz, .skew = a.skew,
               .seed = resolve_seed(a.seed)};
  if (a.json && a.out.empty()) throw ArgumentError("--json needs --out (the tensor would share stdout)");
  const auto t = generate_powerlaw(o);
  if (a.out.empty()) {
    write_frostt(std::cout, t);
    return kExitOk;
  }
  write_frostt(a.out, t);
  const auto st = compute_stats(t, ModeOrder::identity(t.order()));
  if (a.json) {
    json out = {{"command", "gen"}, {"path", a.out}, {"dims", o.dims}, {"nnz", t.nnz()},
                {"skew", o.skew}, {"seed", o.seed}, {"nnz_per_slice", dist_json(st.per_order.nnz_per_slice)}};
    std::cout << out.dump(2) << '\n';
  } else {
    fmt::print("wrote {} ({} nonzeros, dims {})\n", a.out, t.nnz(), fmt::join(o.dims, "x"));
  }
  return kExitOk;
}

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitArgs;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitArgs;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse tensor formats, MTTKRP kernels, CP-ALS and a GPU scheduling model"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "tenkit 0.1.0");

  const std::string fmt_help = "coo|csf|bcsf|hbcsf";
  int rc = kExitOk;

  InspectArgs ia;
  auto* inspect = app.add_subcommand("inspect", "Tensor statistics, storage per format and slice census");
  inspect->add_option("path", ia.path, ".tns file")->required();
  inspect->add_option("--mode-order", ia.mode_order, "inspect one mode order, e.g. 2,0,1 (default: all modes)");
  inspect->add_option("--fiber-threshold", ia.fiber_threshold, "split threshold for the B-CSF storage column")
      ->capture_default_str();
  inspect->add_flag("--json", ia.json, "machine-readable output");
  inspect->callback([&] { rc = guarded([&] { return run_inspect(ia); }); });

  ConvertArgs ca;
  auto* convert = app.add_subcommand("convert", "Build a format, verify it round-trips, write canonical .tns");
  convert->add_option("path", ca.path, ".tns file")->required();
  convert->add_option("--format", ca.format, fmt_help)->capture_default_str();
  convert->add_option("--mode", ca.mode, "only this mode (default: all)");
  convert->add_option("--fiber-threshold", ca.fiber_threshold)->capture_default_str();
  convert->add_option("--out", ca.out, "write the canonical tensor here");
  convert->add_flag("--json", ca.json, "machine-readable output");
  convert->callback([&] { rc = guarded([&] { return run_convert(ca); }); });

  MttkrpArgs ma;
  auto* mt = app.add_subcommand("mttkrp", "Time one MTTKRP kernel");
  mt->add_option("path", ma.path, ".tns file")->required();
  mt->add_option("--format", ma.format, fmt_help)->capture_default_str();
  mt->add_option("--mode", ma.mode)->capture_default_str();
  mt->add_option("--rank", ma.rank)->capture_default_str();
  mt->add_option("--threads", ma.threads, "1 = sequential, 0 = OpenMP default")->capture_default_str();
  mt->add_option("--fiber-threshold", ma.fiber_threshold)->capture_default_str();
  mt->add_option("--seed", ma.seed, "factor seed (falls back to TENKIT_SEED, then 0)");
  mt->add_option("--baseline", ma.baseline, "also time this format and report iterations to amortize");
  mt->add_flag("--check", ma.check, "compare against the COO kernel; exit 4 above --check-tol");
  mt->add_option("--check-tol", ma.check_tol, "largest accepted row-relative deviation")->capture_default_str();
  mt->add_flag("--json", ma.json, "machine-readable output");
  mt->callback([&] { rc = guarded([&] { return run_mttkrp(ma); }); });

  CpdArgs cp;
  auto* cpd = app.add_subcommand("cpd", "CP decomposition by alternating least squares");
  cpd->add_option("path", cp.path, ".tns file")->required();
  cpd->add_option("--rank", cp.rank)->capture_default_str();
  cpd->add_option("--iters", cp.iters, "maximum sweeps")->capture_default_str();
  cpd->add_option("--tol", cp.tol, "stop when the fit changes less than this")->capture_default_str();
  cpd->add_option("--format", cp.format, fmt_help)->capture_default_str();
  cpd->add_option("--seed", cp.seed, "initialisation seed (falls back to TENKIT_SEED, then 0)");
  cpd->add_option("--threads", cp.threads)->capture_default_str();
  cpd->add_option("--fiber-threshold", cp.fiber_threshold)->capture_default_str();
  cpd->add_option("--out", cp.out, "fit history CSV (default: stdout)");
  cpd->add_flag("--json", cp.json, "machine-readable output");
  cpd->callback([&] { rc = guarded([&] { return run_cpd(cp); }); });

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Sweep fiber-split thresholds through the scheduling model");
  sim->add_option("path", sa.path, ".tns file")->required();
  sim->add_option("--mode", sa.mode)->capture_default_str();
  sim->add_option("--thresholds", sa.thresholds, "comma list; inf = no split")->capture_default_str();
  sim->add_option("--sms", sa.sms)->capture_default_str();
  sim->add_option("--block-size", sa.block_size, "threads per block")->capture_default_str();
  sim->add_option("--warp-size", sa.warp_size)->capture_default_str();
  sim->add_option("--blocks-per-sm", sa.blocks_per_sm)->capture_default_str();
  sim->add_option("--out", sa.out, "sweep CSV (default: stdout)");
  sim->add_flag("--json", sa.json, "machine-readable output");
  sim->callback([&] { rc = guarded([&] { return run_simulate(sa); }); });

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "Generate a power-law synthetic tensor");
  gen->add_option("--shape", ga.shape, "dims, e.g. 100x200x50")->required();
  gen->add_option("--nnz", ga.nnz)->required();
  gen->add_option("--skew", ga.skew, "Zipf exponent, 0 = uniform")->capture_default_str();
  gen->add_option("--seed", ga.seed, "falls back to TENKIT_SEED, then 0");
  gen->add_option("--out", ga.out, ".tns path (default: stdout)");
  gen->add_flag("--json", ga.json, "machine-readable summary (needs --out)");
  gen->callback([&] { rc = guarded([&] { return run_gen(ga); }); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitArgs;
  }
  return rc;
}
