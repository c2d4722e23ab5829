#pragma once

// First-order primal-dual (Chambolle-Pock) solvers for KL non-negative
// decomposition, and their alternation into a full NMF solver.

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "klnmf/kernels.hpp"
#include "klnmf/kl_model.hpp"
#include "klnmf/matrix.hpp"
#include "klnmf/trace.hpp"

namespace klnmf {

/// Per-column dual (sigma) and primal (tau) steps with sigma tau ||K||^2 = 1.
struct StepSizes {
  std::vector<double> sigma;
  std::vector<double> tau;
  double norm_k = 0.0;
};

/// Data-driven steps:
///   sigma_j = sqrt(p) 1'K1 / (sqrt(q) ||K|| 1'a_j)
///   tau_j   = sqrt(q) 1'a_j / (sqrt(p) ||K|| 1'K1)
/// Throws when a data column sums to zero.
StepSizes heuristic_step_sizes(const NdProblem& prob, double norm_k);
/// Same, with ||K|| from spectral_norm.
StepSizes heuristic_step_sizes(const NdProblem& prob);

enum class PrimalConstraint {
  nonnegative,  // x >= 0
  simplex,      // each column of x on the probability simplex
};

/// Iterates of one run: primal x, extrapolation x_bar, previous x, dual y.
struct FpaState {
  Matrix x;
  Matrix x_bar;
  Matrix x_old;
  Matrix y;

  /// x_bar = x_old = x0, y = y0.
  static FpaState start(const Matrix& x0, const Matrix& y0);
};

/// The dual starting point K x0.
Matrix initial_dual(const NdProblem& prob, const Matrix& x0);

/// Scratch buffers reused across iterations.
struct FpaWorkspace {
  Matrix kx;   // K x_bar
  Matrix kty;  // K^T y
  explicit FpaWorkspace(const NdProblem& prob);
};

/// One iteration:
///   y <- prox_{sigma F*}(y + sigma o K x_bar)
///   x <- (x - tau o K^T(y + 1))_+       (or simplex projection)
///   x_bar <- 2x - x_old, x_old <- x
void fpa_iteration(const NdProblem& prob, FpaState& state,
                   const StepSizes& steps, FpaWorkspace& ws,
                   PrimalConstraint constraint = PrimalConstraint::nonnegative,
                   kernels::Backend backend = kernels::Backend::omp);

/// True when `gap_tol` enables gap-based stopping (finite and positive).
bool gap_stopping_enabled(double gap_tol);

struct NdOptions {
  std::size_t n_iter = 1000;
  /// Stop once gap <= gap_tol * |primal|. Zero, negative or infinite
  /// disables the test and runs the full budget.
  double gap_tol = 0.0;
  /// Certificates and trace rows every `trace_stride` iterations.
  std::size_t trace_stride = 1;
  PrimalConstraint constraint = PrimalConstraint::nonnegative;
  kernels::Backend backend = kernels::Backend::omp;
};

struct NdResult {
  Matrix x;
  Matrix y;
  ConvergenceTrace trace;
  std::size_t iterations = 0;
  bool reached_gap_tol = false;
};

/// Runs the primal-dual loop from (x0, y0). The trace starts with the primal
/// value at x0 (data_access 0) and then holds one row per certificate, where
/// one iteration counts as one data access. Certificates are only available
/// for the non-negative constraint; simplex runs record the primal value.
/// Throws NumericalError on a non-finite iterate.
NdResult fpa_nd(const NdProblem& prob, const Matrix& x0, const Matrix& y0,
                const StepSizes& steps, const NdOptions& options);
NdResult fpa_nd(const NdProblem& prob, const Matrix& x0, const Matrix& y0,
                const StepSizes& steps, std::size_t n_iter,
                double gap_tol = 0.0);

/// Rescales W to unit column sums and H rows by the inverse, keeping WH.
/// Throws on a zero column of W.
std::pair<Matrix, Matrix> normalize_factors(const Matrix& w, const Matrix& h);

constexpr std::size_t kDefaultIterNd = 5;

struct SolveConfig {
  /// Inner primal-dual iterations per convex block.
  std::size_t iter_nd = kDefaultIterNd;
  /// Total budget in data accesses.
  std::size_t max_data_access = 3000;
  /// Relative gap tolerance, as in NdOptions.
  double gap_tol = 0.0;
  bool record_trace = true;
  /// Trace every `trace_stride` outer blocks.
  std::size_t trace_stride = 1;
  /// Value written into zero factor columns that must be repaired.
  double repair_value = kDefaultInitOffset;
  kernels::Backend backend = kernels::Backend::omp;
};

struct NmfResult {
  Matrix w;
  Matrix h;
  ConvergenceTrace trace;
  std::size_t outer_iterations = 0;
  std::size_t data_access = 0;
  /// Zero factor columns/rows re-seeded with `repair_value`.
  std::size_t repairs = 0;
};

/// Alternating primal-dual NMF. Each outer iteration normalizes W, runs
/// `iter_nd` iterations on W (K = H^T), then `iter_nd` on H (K = W), sharing
/// one dual matrix between the blocks. An outer iteration consumes `iter_nd`
/// data accesses. Trace rows carry D(V || WH) and the certificate of the
/// H block.
NmfResult nmf_fpa(const Matrix& v, const Matrix& w0, const Matrix& h0,
                  const SolveConfig& cfg);

/// Pads W with (r2 - r) constant-c columns and H with strictly positive
/// random rows. With c = 0 the product WH is unchanged.
std::pair<Matrix, Matrix> extend_rank(const Matrix& w, const Matrix& h,
                                      std::size_t r2, double c,
                                      RandomSeed seed,
                                      double offset = kDefaultInitOffset);

enum class Side {
  fix_h,  // estimate W with H fixed (K = H^T, a = rows of V)
  fix_w,  // estimate H with W fixed (K = W, a = columns of V)
};

struct NdBatchResult {
  /// W (n x r) for fix_h, H (r x m) for fix_w.
  Matrix factor;
  Matrix dual;
  ConvergenceTrace trace;
  std::size_t iterations = 0;
  bool reached_gap_tol = false;
};

/// All columns solved as one batched run with per-column steps, starting
/// from `start` (same orientation as the returned factor) and y = K x0.
/// Runs cfg.max_data_access iterations unless the gap tolerance is met.
NdBatchResult nd_batch(const Matrix& v, const Matrix& fixed,
                       const Matrix& start, Side side, const SolveConfig& cfg);

}  // namespace klnmf
