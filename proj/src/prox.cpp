#include "klnmf/prox.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "klnmf/error.hpp"

namespace klnmf {

namespace {

std::vector<double> per_column(std::span<const double> step, std::size_t cols,
                               bool allow_zero, const char* what) {
  if (step.size() != 1 && step.size() != cols) {
    throw Error(std::string(what) + ": step vector length must be 1 or cols");
  }
  for (double s : step) {
    if (!(allow_zero ? s >= 0.0 : s > 0.0)) {
      throw Error(std::string(what) + ": step sizes must be positive");
    }
  }
  if (step.size() == cols) return {step.begin(), step.end()};
  return std::vector<double>(cols, step[0]);
}

void require_col_sums(const Matrix& x, std::span<const double> col_sums,
                      const char* what) {
  if (col_sums.size() != x.rows()) {
    throw Error(std::string(what) + ": col_sums length must equal rows of x");
  }
}

}  // namespace

Matrix prox_f_star(const Matrix& y, std::span<const double> sigma,
                   const Matrix& a) {
  require_same_shape(y, a, "prox_f_star");
  require_nonnegative(a, "prox_f_star data");
  const auto s = per_column(sigma, y.cols(), false, "prox_f_star");
  Matrix out(y.rows(), y.cols(), 0.0, Role::dual);
  for (std::size_t i = 0; i < y.rows(); ++i) {
    for (std::size_t j = 0; j < y.cols(); ++j) {
      out(i, j) = prox_f_star_scalar(y(i, j), s[j], a(i, j));
    }
  }
  return out;
}

Matrix prox_f_star(const Matrix& y, double sigma, const Matrix& a) {
  return prox_f_star(y, std::span<const double>(&sigma, 1), a);
}

Matrix prox_g(const Matrix& x, std::span<const double> tau,
              std::span<const double> col_sums) {
  require_col_sums(x, col_sums, "prox_g");
  const auto t = per_column(tau, x.cols(), false, "prox_g");
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      out(i, j) = prox_g_scalar(x(i, j), t[j], col_sums[i]);
    }
  }
  return out;
}

Matrix prox_g(const Matrix& x, double tau, std::span<const double> col_sums) {
  return prox_g(x, std::span<const double>(&tau, 1), col_sums);
}

std::vector<double> project_simplex(std::span<const double> v) {
  if (v.empty()) throw Error("project_simplex: empty vector");
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double prefix = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    prefix += sorted[k];
    const double candidate = (prefix - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
  return out;
}

Matrix prox_g_simplex(const Matrix& x, std::span<const double> tau,
                      std::span<const double> col_sums) {
  require_col_sums(x, col_sums, "prox_g_simplex");
  const auto t = per_column(tau, x.cols(), true, "prox_g_simplex");
  Matrix out(x.rows(), x.cols());
  std::vector<double> shifted(x.rows());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
      shifted[i] = x(i, j) - t[j] * col_sums[i];
    }
    const auto projected = project_simplex(shifted);
    for (std::size_t i = 0; i < x.rows(); ++i) out(i, j) = projected[i];
  }
  return out;
}

Matrix prox_g_simplex(const Matrix& x, double tau,
                      std::span<const double> col_sums) {
  return prox_g_simplex(x, std::span<const double>(&tau, 1), col_sums);
}

}  // namespace klnmf
