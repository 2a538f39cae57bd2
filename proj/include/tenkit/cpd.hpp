#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tenkit/factor.hpp"
#include "tenkit/representation.hpp"

namespace tenkit {

/// R x R symmetric positive semidefinite matrix.
using GramMatrix = Eigen::MatrixXd;

/// Factor matrices with column weights: X ~ sum_r lambda_r a_r o b_r o c_r.
struct KruskalModel {
  std::size_t rank = 0;
  std::vector<FactorMatrix> factors;
  std::vector<double> lambda;

  /// Model value at one coordinate.
  double at(std::span<const index_t> idx) const;
};

/// F^T F, computed on the upper triangle and mirrored.
GramMatrix gram(const FactorMatrix& f);

/// Elementwise product of every Gram except `skip`.
GramMatrix hadamard_all_but(std::span<const GramMatrix> grams, std::size_t skip);

/// Moore-Penrose inverse of a symmetric PSD matrix by eigendecomposition.
/// Eigenvalues at or below tol * lambda_max are treated as zero; a negative
/// `tol` selects R * eps. Throws ArgumentError if `g` is not symmetric to
/// 1e-12 relative to its largest entry.
GramMatrix pinv_spsd(const GramMatrix& g, double tol = -1.0);

struct CpAlsOptions {
  std::size_t rank = 32;
  std::size_t max_iters = 50;
  double fit_tol = 1e-5;
  std::uint64_t seed = 0;
  ExecOptions exec;
};

struct IterationRecord {
  std::size_t iteration = 0;  ///< 0 is the initial model
  double fit = 0.0;
  double delta = 0.0;
  std::vector<double> mttkrp_seconds;  ///< per mode
  OpCount ops;
};

struct CpAlsResult {
  KruskalModel model;
  std::vector<IterationRecord> history;
  std::vector<std::string> warnings;
};

/// Uniform [0, 1) factors from a seeded mt19937_64, lambda = 1.
KruskalModel init_model(std::span<const std::size_t> dims, std::size_t rank, std::uint64_t seed);

/// New mode-n factor: MTTKRP(X, factors, n) * pinv(hadamard of the other Grams).
FactorMatrix als_update_mode(const AllModeTensor& t, const KruskalModel& model, std::size_t mode,
                             const ExecOptions& exec = {});

/// 1 - ||X - model||_F / ||X||_F evaluated through Gram matrices and one
/// MTTKRP, never forming the dense model.
double model_fit(const AllModeTensor& t, const KruskalModel& model, const ExecOptions& exec = {});

/// Alternating least squares. Each sweep updates modes in ascending order,
/// then normalises every column to unit 2-norm and folds the norms into
/// lambda. Stops when |fit_i - fit_{i-1}| < fit_tol or after max_iters
/// sweeps. Throws NumericalError if a factor turns non-finite.
CpAlsResult cp_als(const AllModeTensor& t, const CpAlsOptions& opts);

}  // namespace tenkit
