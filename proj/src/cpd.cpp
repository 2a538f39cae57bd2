#include "tenkit/cpd.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "tenkit/errors.hpp"

namespace tenkit {

double KruskalModel::at(std::span<const index_t> idx) const {
  double sum = 0.0;
  for (std::size_t r = 0; r < rank; ++r) {
    double p = lambda[r];
    for (std::size_t d = 0; d < factors.size(); ++d) p *= factors[d](idx[d], r);
    sum += p;
  }
  return sum;
}

GramMatrix gram(const FactorMatrix& f) {
  const std::size_t rank = f.cols();
  GramMatrix g = GramMatrix::Zero(rank, rank);
  for (std::size_t i = 0; i < f.rows(); ++i) {
    const auto row = f.row(i);
    for (std::size_t p = 0; p < rank; ++p) {
      for (std::size_t q = p; q < rank; ++q) g(p, q) += row[p] * row[q];
    }
  }
  for (std::size_t p = 0; p < rank; ++p) {
    for (std::size_t q = 0; q < p; ++q) g(p, q) = g(q, p);
  }
  return g;
}

GramMatrix hadamard_all_but(std::span<const GramMatrix> grams, std::size_t skip) {
  if (grams.empty()) throw ArgumentError("no Gram matrices");
  GramMatrix out = GramMatrix::Ones(grams.front().rows(), grams.front().cols());
  for (std::size_t d = 0; d < grams.size(); ++d) {
    if (d != skip) out = out.cwiseProduct(grams[d]);
  }
  return out;
}

GramMatrix pinv_spsd(const GramMatrix& g, double tol) {
  if (g.rows() != g.cols()) throw ArgumentError("pseudo-inverse needs a square matrix");
  if (g.size() == 0) return g;
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ArgumentError("matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<GramMatrix> eig(g);
  const auto& ev = eig.eigenvalues();
  const double lmax = ev.cwiseAbs().maxCoeff();
  if (tol < 0) tol = static_cast<double>(g.rows()) * std::numeric_limits<double>::epsilon();
  const double cutoff = tol * lmax;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] > cutoff) inv[i] = 1.0 / ev[i];
  }
  const auto& v = eig.eigenvectors();
  GramMatrix out = v * inv.asDiagonal() * v.transpose();
  return 0.5 * (out + out.transpose());
}

KruskalModel init_model(std::span<const std::size_t> dims, std::size_t rank, std::uint64_t seed) {
  if (rank == 0) throw ArgumentError("rank must be >= 1");
  std::mt19937_64 rng(seed);
  KruskalModel m;
  m.rank = rank;
  for (std::size_t d : dims) m.factors.push_back(FactorMatrix::random(d, rank, rng));
  m.lambda.assign(rank, 1.0);
  return m;
}

namespace {

FactorMatrix times(const FactorMatrix& a, const GramMatrix& b) {
  const std::size_t rank = a.cols();
  FactorMatrix out(a.rows(), rank);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < rank; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t r = 0; r < rank; ++r) out(i, r) += aik * b(k, r);
    }
  }
  return out;
}

double tensor_norm_sq(const CooTensor& t) {
  double s = 0.0;
  for (double v : t.values()) s += v * v;
  return s;
}

/// ||model||^2 = sum_pq lambda_p lambda_q prod_d G_d(p, q).
double model_norm_sq(const KruskalModel& m, std::span<const GramMatrix> grams) {
  GramMatrix h = hadamard_all_but(grams, grams.size());
  double s = 0.0;
  for (std::size_t p = 0; p < m.rank; ++p) {
    for (std::size_t q = 0; q < m.rank; ++q) s += m.lambda[p] * m.lambda[q] * h(p, q);
  }
  return s;
}

/// <X, model> given the MTTKRP of the last mode against the other factors.
double inner_product(const KruskalModel& m, const FactorMatrix& mttkrp_last) {
  const FactorMatrix& a = m.factors.back();
  double s = 0.0;
  for (std::size_t r = 0; r < m.rank; ++r) {
    double col = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) col += mttkrp_last(i, r) * a(i, r);
    s += m.lambda[r] * col;
  }
  return s;
}

double fit_from(double norm_x_sq, double norm_model_sq, double inner) {
  const double resid_sq = std::max(0.0, norm_x_sq + norm_model_sq - 2.0 * inner);
  return 1.0 - std::sqrt(resid_sq) / std::sqrt(norm_x_sq);
}

bool all_finite(const FactorMatrix& f) {
  for (double v : f.data()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

FactorMatrix als_update_mode(const AllModeTensor& t, const KruskalModel& model, std::size_t mode,
                             const ExecOptions& exec) {
  std::vector<GramMatrix> grams;
  for (const auto& f : model.factors) grams.push_back(gram(f));
  const auto y = t.mttkrp(model.factors, mode, exec);
  return times(y.output, pinv_spsd(hadamard_all_but(grams, mode)));
}

double model_fit(const AllModeTensor& t, const KruskalModel& model, const ExecOptions& exec) {
  std::vector<GramMatrix> grams;
  for (const auto& f : model.factors) grams.push_back(gram(f));
  const std::size_t last = t.order() - 1;
  const auto y = t.mttkrp(model.factors, last, exec);
  return fit_from(tensor_norm_sq(t.coo()), model_norm_sq(model, grams),
                  inner_product(model, y.output));
}

CpAlsResult cp_als(const AllModeTensor& t, const CpAlsOptions& opts) {
  if (t.coo().empty()) throw ArgumentError("cannot decompose an empty tensor");
  const std::size_t n = t.order();
  const std::size_t rank = opts.rank;
  CpAlsResult res;
  res.model = init_model(t.dims(), rank, opts.seed);
  for (std::size_t d = 0; d < n; ++d) {
    if (rank > t.dims()[d]) {
      res.warnings.push_back("rank " + std::to_string(rank) + " exceeds dimension " +
                             std::to_string(t.dims()[d]) + " of mode " + std::to_string(d));
    }
  }
  KruskalModel& m = res.model;
  const double norm_x_sq = tensor_norm_sq(t.coo());

  IterationRecord init;
  init.fit = model_fit(t, m, opts.exec);
  res.history.push_back(init);

  std::vector<GramMatrix> grams;
  for (const auto& f : m.factors) grams.push_back(gram(f));
  using clock = std::chrono::steady_clock;

  for (std::size_t it = 1; it <= opts.max_iters; ++it) {
    IterationRecord rec;
    rec.iteration = it;
    FactorMatrix last_mttkrp;
    for (std::size_t mode = 0; mode < n; ++mode) {
      const auto t0 = clock::now();
      auto y = t.mttkrp(m.factors, mode, opts.exec);
      rec.mttkrp_seconds.push_back(std::chrono::duration<double>(clock::now() - t0).count());
      rec.ops += y.ops;
      m.factors[mode] = times(y.output, pinv_spsd(hadamard_all_but(grams, mode)));
      if (!all_finite(m.factors[mode])) {
        throw NumericalError("non-finite entries in factor " + std::to_string(mode), it);
      }
      grams[mode] = gram(m.factors[mode]);
      if (mode + 1 == n) last_mttkrp = std::move(y.output);
    }
    // the last update absorbed all scale; lambda restarts from one
    std::fill(m.lambda.begin(), m.lambda.end(), 1.0);
    const double inner = inner_product(m, last_mttkrp);
    for (std::size_t d = 0; d < n; ++d) {
      auto& f = m.factors[d];
      for (std::size_t r = 0; r < rank; ++r) {
        const double norm = std::sqrt(grams[d](r, r));
        m.lambda[r] *= norm;
        if (norm == 0.0) continue;
        for (std::size_t i = 0; i < f.rows(); ++i) f(i, r) /= norm;
      }
      grams[d] = gram(f);
    }
    rec.fit = fit_from(norm_x_sq, model_norm_sq(m, grams), inner);
    rec.delta = rec.fit - res.history.back().fit;
    res.history.push_back(rec);
    if (!std::isfinite(rec.fit)) throw NumericalError("fit is not finite", it);
    if (std::abs(rec.delta) < opts.fit_tol) break;
  }
  return res;
}

}  // namespace tenkit
