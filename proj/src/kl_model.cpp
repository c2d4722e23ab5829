#include "klnmf/kl_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "klnmf/error.hpp"
#include "klnmf/kernels.hpp"

namespace klnmf {

NdProblem::NdProblem(Matrix a, Matrix k)
    : a_(std::move(a)), k_(std::move(k)) {
  if (a_.rows() != k_.rows()) {
    throw Error("NdProblem: data rows must match factor rows");
  }
  require_nonnegative(a_, "NdProblem data");
  require_nonnegative(k_, "NdProblem factor");
  col_sums_ = column_sums(k_);
  for (std::size_t j = 0; j < col_sums_.size(); ++j) {
    if (!(col_sums_[j] > 0.0)) {
      std::ostringstream msg;
      msg << "NdProblem: factor column " << j << " is zero";
      throw Error(msg.str());
    }
  }
}

double kl_divergence(const Matrix& v, const Matrix& p) {
  require_same_shape(v, p, "kl_divergence");
  std::vector<double> rows(v.rows());
  if (!kernels::omp::kl_row_sums(v, p, rows)) {
    throw Error("KL undefined: model entry is not positive where data is positive");
  }
  double total = 0.0;
  for (double r : rows) total += r;
  return total;
}

double kl_divergence_extended(const Matrix& v, const Matrix& p) {
  require_same_shape(v, p, "kl_divergence_extended");
  std::vector<double> rows(v.rows());
  if (!kernels::omp::kl_row_sums(v, p, rows)) {
    return std::numeric_limits<double>::infinity();
  }
  double total = 0.0;
  for (double r : rows) total += r;
  return total;
}

double primal_objective(const NdProblem& prob, const Matrix& x) {
  if (x.rows() != prob.q() || x.cols() != prob.batch()) {
    throw Error("primal_objective: x has the wrong shape");
  }
  return kl_divergence(prob.data(), multiply(prob.factor(), x));
}

double dual_objective(const NdProblem& prob, const Matrix& y) {
  require_same_shape(prob.data(), y, "dual_objective");
  const Matrix& a = prob.data();
  double total = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j) == 0.0) continue;
      if (!(y(i, j) < 0.0)) throw Error("dual iterate outside domain");
      acc += a(i, j) * std::log(-y(i, j));
    }
    total += acc;
  }
  return total;
}

Matrix project_dual_feasible(const NdProblem& prob, const Matrix& y) {
  require_same_shape(prob.data(), y, "project_dual_feasible");
  if (max_abs(y) == 0.0) throw Error("no informative dual point");
  Matrix out = y;
  out.set_role(Role::dual);
  for (double& v : out.values()) {
    if (v > 0.0) v = -kDualClampFloor;
  }

  // K^T(-y), one column per batch entry.
  Matrix neg = out;
  for (double& v : neg.values()) v = -v;
  const Matrix kt = multiply_tn(prob.factor(), neg);
  const auto& c = prob.col_sums();
  for (std::size_t j = 0; j < out.cols(); ++j) {
    double worst = 0.0;
    for (std::size_t i = 0; i < kt.rows(); ++i) {
      worst = std::max(worst, kt(i, j) / c[i]);
    }
    if (worst > 1.0) {
      for (std::size_t i = 0; i < out.rows(); ++i) out(i, j) /= worst;
    }
  }
  return out;
}

Certificate certificate(const NdProblem& prob, const Matrix& x, const Matrix& y) {
  Certificate cert;
  cert.feasible_dual = project_dual_feasible(prob, y);
  cert.primal_value = primal_objective(prob, x);
  cert.dual_value = dual_objective(prob, cert.feasible_dual);
  cert.gap = cert.primal_value - cert.dual_value;
  return cert;
}

Certificate certificate_extended(const NdProblem& prob, const Matrix& x,
                                 const Matrix& y) {
  if (x.rows() != prob.q() || x.cols() != prob.batch()) {
    throw Error("certificate: x has the wrong shape");
  }
  Certificate cert;
  cert.feasible_dual = project_dual_feasible(prob, y);
  cert.primal_value =
      kl_divergence_extended(prob.data(), multiply(prob.factor(), x));
  cert.dual_value = dual_objective(prob, cert.feasible_dual);
  cert.gap = cert.primal_value - cert.dual_value;
  return cert;
}

}  // namespace klnmf
