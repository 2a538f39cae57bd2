#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

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

namespace py = pybind11;
using namespace tenkit;

namespace {

using IndexArray = py::array_t<index_t, py::array::c_style | py::array::forcecast>;
using ValueArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Results that already have a JSON form cross the boundary as JSON text;
// the Python package decodes them.
std::string dumps(const nlohmann::json& j) { return j.dump(); }

CooTensor from_arrays(const IndexArray& idx, const ValueArray& vals, std::vector<std::size_t> dims) {
  if (idx.ndim() != 2) throw ArgumentError("indices must be a 2-D (nnz, order) array");
  if (vals.ndim() != 1 || vals.shape(0) != idx.shape(0))
    throw ArgumentError("values must be 1-D with one entry per index row");
  const auto nnz = static_cast<std::size_t>(idx.shape(0));
  const auto order = static_cast<std::size_t>(idx.shape(1));
  if (dims.empty()) {
    dims.assign(order, 0);
    auto r = idx.unchecked<2>();
    for (std::size_t x = 0; x < nnz; ++x)
      for (std::size_t d = 0; d < order; ++d) dims[d] = std::max<std::size_t>(dims[d], r(x, d) + 1);
  }
  if (dims.size() != order) throw ArgumentError("dims length must equal the index column count");
  CooTensor t(dims);
  t.reserve(nnz);
  const index_t* p = idx.data();
  const double* v = vals.data();
  for (std::size_t x = 0; x < nnz; ++x) t.push_back(std::span<const index_t>(p + x * order, order), v[x]);
  return t;
}

py::tuple to_arrays(const CooTensor& t) {
  IndexArray idx({t.nnz(), t.order()});
  ValueArray vals(t.nnz());
  auto w = idx.mutable_unchecked<2>();
  for (std::size_t x = 0; x < t.nnz(); ++x) {
    for (std::size_t d = 0; d < t.order(); ++d) w(x, d) = t.index(x, d);
    vals.mutable_at(x) = t.value(x);
  }
  return py::make_tuple(idx, vals);
}

FactorMatrix to_factor(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw ArgumentError("factor matrices must be 2-D");
  FactorMatrix f(a.shape(0), a.shape(1));
  std::copy(a.data(), a.data() + a.size(), f.data().begin());
  return f;
}

py::array_t<double> to_numpy(const FactorMatrix& f) {
  py::array_t<double> a({f.rows(), f.cols()});
  std::copy(f.data().begin(), f.data().end(), a.mutable_data());
  return a;
}

std::vector<FactorMatrix> to_factors(const std::vector<py::array_t<double, py::array::c_style | py::array::forcecast>>& fs) {
  std::vector<FactorMatrix> out;
  for (const auto& a : fs) out.push_back(to_factor(a));
  return out;
}

nlohmann::json dist(const Distribution& d) {
  return {{"count", d.count}, {"max", d.max}, {"mean", d.mean}, {"stddev", d.stddev}};
}

ModeOrder order_or_identity(const CooTensor& t, const std::optional<std::vector<std::size_t>>& order) {
  return order ? ModeOrder(*order) : ModeOrder::identity(t.order());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sparse tensor formats, MTTKRP kernels, CP-ALS and a GPU scheduling model.";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_MemoryError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<CooTensor>(m, "Tensor")
      .def(py::init(&from_arrays), py::arg("indices"), py::arg("values"),
           py::arg("dims") = std::vector<std::size_t>{},
           "Build from an (nnz, order) array of 0-based indices and a value array.")
      .def_property_readonly("dims", &CooTensor::dims)
      .def_property_readonly("order", &CooTensor::order)
      .def_property_readonly("nnz", &CooTensor::nnz)
      .def("arrays", &to_arrays, "(indices, values) as numpy arrays")
      .def("canonical", [](const CooTensor& t) { return canonicalize(t); },
           "Sorted copy with duplicates summed and zeros dropped.")
      .def("__eq__", [](const CooTensor& a, const CooTensor& b) { return a == b; })
      .def("__repr__", [](const CooTensor& t) {
        std::string s = "Tensor(dims=[";
        for (std::size_t d = 0; d < t.order(); ++d) s += (d ? ", " : "") + std::to_string(t.dims()[d]);
        return s + "], nnz=" + std::to_string(t.nnz()) + ")";
      });

  m.def("read_frostt", [](const std::string& path) { return read_frostt(path); }, py::arg("path"));
  m.def("write_frostt", [](const CooTensor& t, const std::string& path) { write_frostt(path, t); },
        py::arg("tensor"), py::arg("path"));
  m.def("generate",
        [](std::vector<std::size_t> dims, std::size_t nnz, double skew, std::uint64_t seed) {
          return generate_powerlaw({.dims = std::move(dims), .nnz = nnz, .skew = skew, .seed = seed});
        },
        py::arg("dims"), py::arg("nnz"), py::arg("skew") = 0.0, py::arg("seed") = 0);

  m.def("_stats",
        [](const CooTensor& t, const std::optional<std::vector<std::size_t>>& order) {
          const auto s = compute_stats(t, order_or_identity(t, order));
          return dumps({{"order", s.order}, {"dims", s.dims}, {"nnz", s.nnz}, {"density", s.density},
                        {"mode_order", s.per_order.mode_order.levels()},
                        {"slices", s.per_order.slices}, {"fibers", s.per_order.fibers},
                        {"nnz_per_slice", dist(s.per_order.nnz_per_slice)},
                        {"nnz_per_fiber", dist(s.per_order.nnz_per_fiber)}});
        },
        py::arg("tensor"), py::arg("mode_order") = py::none());

  m.def("_storage",
        [](const CooTensor& t, const std::string& format, std::size_t mode, std::size_t fiber_threshold) {
          const auto rep = build_representation(t, parse_format(format), mode, {.fiber_threshold = fiber_threshold});
          return dumps(rep.storage(t));
        },
        py::arg("tensor"), py::arg("format"), py::arg("mode") = 0, py::arg("fiber_threshold") = 128);

  m.def("slice_census",
        [](const CooTensor& t, const std::optional<std::vector<std::size_t>>& order) {
          std::vector<std::string> out;
          for (auto k : classify_slices(build_csf(t, order_or_identity(t, order))))
            out.emplace_back(to_string(k));
          return out;
        },
        py::arg("tensor"), py::arg("mode_order") = py::none(),
        "Per-slice HB-CSF partition label: 'COO', 'CSL' or 'CSF'.");

  m.def("mttkrp",
        [](const CooTensor& t, const std::vector<py::array_t<double, py::array::c_style | py::array::forcecast>>& fs,
           std::size_t mode, const std::string& format, std::size_t fiber_threshold, int threads) {
          const auto factors = to_factors(fs);
          const auto rep = build_representation(t, parse_format(format), mode, {.fiber_threshold = fiber_threshold});
          MttkrpResult r;
          {
            py::gil_scoped_release nogil;
            r = tenkit::mttkrp(rep, t, factors, {.parallel = threads != 1, .threads = threads});
          }
          return py::make_tuple(to_numpy(r.output), py::dict(py::arg("muls") = r.ops.muls,
                                                             py::arg("adds") = r.ops.adds));
        },
        py::arg("tensor"), py::arg("factors"), py::arg("mode"), py::arg("format") = "hbcsf",
        py::arg("fiber_threshold") = 128, py::arg("threads") = 1,
        "Returns (output matrix, {'muls', 'adds'}).");

  m.def("mttkrp_dense",
        [](const CooTensor& t, const std::vector<py::array_t<double, py::array::c_style | py::array::forcecast>>& fs,
           std::size_t mode) { return to_numpy(mttkrp_dense_oracle(t, to_factors(fs), mode)); },
        py::arg("tensor"), py::arg("factors"), py::arg("mode"));

  m.def("pinv_spsd", [](const Eigen::MatrixXd& g, double tol) { return pinv_spsd(g, tol); }, py::arg("g"),
        py::arg("tol") = -1.0);

  m.def("cp_als",
        [](const CooTensor& t, std::size_t rank, std::size_t max_iters, double tol, std::uint64_t seed,
           const std::string& format, int threads) {
          const AllModeTensor at(canonicalize(t), parse_format(format));
          CpAlsResult res;
          {
            py::gil_scoped_release nogil;
            res = cp_als(at, {.rank = rank, .max_iters = max_iters, .fit_tol = tol, .seed = seed,
                              .exec = {.parallel = threads != 1, .threads = threads}});
          }
          py::list factors, history;
          for (const auto& f : res.model.factors) factors.append(to_numpy(f));
          for (const auto& h : res.history) {
            history.append(py::dict(py::arg("iteration") = h.iteration, py::arg("fit") = h.fit,
                                    py::arg("delta") = h.delta, py::arg("mttkrp_seconds") = h.mttkrp_seconds,
                                    py::arg("muls") = h.ops.muls, py::arg("adds") = h.ops.adds));
          }
          return py::dict(py::arg("factors") = factors, py::arg("lambda") = res.model.lambda,
                          py::arg("history") = history, py::arg("warnings") = res.warnings);
        },
        py::arg("tensor"), py::arg("rank") = 32, py::arg("max_iters") = 50, py::arg("tol") = 1e-5,
        py::arg("seed") = 0, py::arg("format") = "hbcsf", py::arg("threads") = 1);

  m.def("_simulate",
        [](const CooTensor& t, const std::vector<std::optional<std::size_t>>& thresholds, std::size_t mode,
           std::size_t sms, std::size_t block_size, std::size_t warp_size) {
          std::vector<std::size_t> th;
          for (const auto& x : thresholds) th.push_back(x.value_or(kNoSplit));
          const SplitConfig cfg{.block_size = block_size, .warp_size = warp_size};
          cfg.validate();
          const MachineModel machine{.num_sms = sms, .warps_per_block = block_size / warp_size,
                                     .warp_size = warp_size};
          const auto rows = sweep_split(build_csf(canonicalize(t), ModeOrder::for_mode(mode, t.dims())), th,
                                        machine, cfg);
          nlohmann::json out = nlohmann::json::array();
          for (const auto& r : rows) {
            out.push_back({{"threshold", r.threshold == kNoSplit ? nlohmann::json(nullptr) : nlohmann::json(r.threshold)},
                           {"makespan", r.report.makespan_cycles},
                           {"sm_efficiency_proxy", r.report.sm_efficiency_proxy},
                           {"occupancy_proxy", r.report.occupancy_proxy},
                           {"stddev_fbr", r.metrics.nnz_per_fiber.stddev},
                           {"stddev_slc", r.metrics.nnz_per_slice.stddev}});
          }
          return dumps(out);
        },
        py::arg("tensor"), py::arg("thresholds"), py::arg("mode") = 0, py::arg("sms") = 56,
        py::arg("block_size") = 512, py::arg("warp_size") = 32);
}
