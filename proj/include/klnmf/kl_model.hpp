#pragma once

#include <vector>

#include "klnmf/matrix.hpp"

namespace klnmf {

/// Convex decomposition instance a ~= K x. `a` is p x cols: each column is an
/// independent problem sharing the fixed factor K (p x q).
class NdProblem {
 public:
  NdProblem(Matrix a, Matrix k);

  const Matrix& data() const noexcept { return a_; }
  const Matrix& factor() const noexcept { return k_; }
  /// K^T 1, one entry per column of K.
  const std::vector<double>& col_sums() const noexcept { return col_sums_; }
  std::size_t p() const noexcept { return k_.rows(); }
  std::size_t q() const noexcept { return k_.cols(); }
  std::size_t batch() const noexcept { return a_.cols(); }

 private:
  Matrix a_;
  Matrix k_;
  std::vector<double> col_sums_;
};

struct Certificate {
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  Matrix feasible_dual;
};

/// Value substituted for positive dual entries before projection.
constexpr double kDualClampFloor = 1e-300;

/// Generalized KL divergence D(V || P); entries with V = 0 contribute P.
double kl_divergence(const Matrix& v, const Matrix& p);

/// Same, but an undefined term makes the value +infinity instead of throwing.
/// Solvers use it for trace rows: a projected step can zero out a model
/// entry, and the objective there is genuinely infinite.
double kl_divergence_extended(const Matrix& v, const Matrix& p);

/// D(a || K x), summed over batch columns.
double primal_objective(const NdProblem& prob, const Matrix& x);

/// sum a_i log(-y_i); entries with a_i = 0 contribute nothing.
double dual_objective(const NdProblem& prob, const Matrix& y);

/// Rescales each column of y so that K^T(-y) <= K^T 1. Positive entries are
/// first replaced by to -kDualClampFloor. Feasible columns are left unchanged.
Matrix project_dual_feasible(const NdProblem& prob, const Matrix& y);

/// Projects y, then evaluates both objectives and their gap.
Certificate certificate(const NdProblem& prob, const Matrix& x, const Matrix& y);

/// As certificate, with the primal value (and so the gap) +infinity where
/// K x vanishes on positive data.
Certificate certificate_extended(const NdProblem& prob, const Matrix& x,
                                 const Matrix& y);

}  // namespace klnmf
