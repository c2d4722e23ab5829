#include "klnmf/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "klnmf/error.hpp"
#include "klnmf/kernels.hpp"

namespace klnmf {

namespace {

void require_dims(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw Error("matrix dimensions must be positive");
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill, Role role)
    : rows_(rows), cols_(cols), values_(rows * cols, fill), role_(role) {
  require_dims(rows, cols);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values,
               Role role)
    : rows_(rows), cols_(cols), values_(std::move(values)), role_(role) {
  require_dims(rows, cols);
  if (values_.size() != rows * cols) {
    throw Error("matrix data length does not match rows x cols");
  }
}

Matrix Matrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows, Role role) {
  const std::size_t n = rows.size();
  const std::size_t m = n ? rows.begin()->size() : 0;
  std::vector<double> values;
  values.reserve(n * m);
  for (const auto& r : rows) {
    if (r.size() != m) throw Error("ragged matrix literal");
    values.insert(values.end(), r.begin(), r.end());
  }
  return Matrix(n, m, std::move(values), role);
}

Matrix Matrix::column(std::span<const double> values, Role role) {
  return Matrix(values.size(), 1,
                std::vector<double>(values.begin(), values.end()), role);
}

std::vector<double> Matrix::column_copy(std::size_t j) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream msg;
    msg << what << ": shape mismatch (" << a.rows() << "x" << a.cols()
        << " vs " << b.rows() << "x" << b.cols() << ")";
    throw Error(msg.str());
  }
}

void require_nonnegative(const Matrix& a, const char* what) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (!(a(i, j) >= 0.0)) {
        std::ostringstream msg;
        msg << what << ": entry (" << i << ", " << j << ") = " << a(i, j)
            << " is not a non-negative number";
        throw Error(msg.str());
      }
    }
  }
}

void require_finite(const Matrix& a, const char* what) {
  for (double v : a.values()) {
    if (!std::isfinite(v)) throw Error(std::string(what) + ": non-finite entry");
  }
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows(), 0.0, a.role());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  }
  return t;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error("multiply: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  kernels::omp::gemm(a, b, c);
  return c;
}

Matrix multiply_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw Error("multiply_tn: inner dimensions differ");
  Matrix c(a.cols(), b.cols());
  kernels::omp::gemm_tn(a, b, c);
  return c;
}

Matrix multiply_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw Error("multiply_nt: inner dimensions differ");
  Matrix c(a.rows(), b.rows());
  kernels::omp::gemm_nt(a, b, c);
  return c;
}

std::vector<double> column_sums(const Matrix& a) {
  std::vector<double> s(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) s[j] += a(i, j);
  }
  return s;
}

std::vector<double> row_sums(const Matrix& a) {
  std::vector<double> s(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (double v : a.row(i)) s[i] += v;
  }
  return s;
}

double total_sum(const Matrix& a) {
  double s = 0.0;
  for (double v : row_sums(a)) s += v;
  return s;
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.values()) s += v * v;
  return std::sqrt(s);
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  }
  return m;
}

Matrix floored(const Matrix& a, double floor) {
  Matrix out = a;
  for (double& v : out.values()) v = std::max(v, floor);
  return out;
}

double spectral_norm(const Matrix& k, double tol, std::size_t max_iter) {
  if (!(tol > 0.0)) throw Error("spectral_norm: tol must be positive");
  if (max_abs(k) == 0.0) {
    throw Error("zero matrix has no usable spectral norm for step sizes");
  }
  // Iterate on the smaller side: v <- K^T K v (or K K^T v).
  const bool right = k.cols() <= k.rows();
  const std::size_t dim = right ? k.cols() : k.rows();
  Matrix v(dim, 1, 1.0 / std::sqrt(static_cast<double>(dim)));
  Matrix kv(right ? k.rows() : k.cols(), 1);
  Matrix w(dim, 1);

  double estimate = 0.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    if (right) {
      kernels::serial::gemm(k, v, kv);
      kernels::serial::gemm_tn(k, kv, w);
    } else {
      kernels::serial::gemm_tn(k, v, kv);
      kernels::serial::gemm(k, kv, w);
    }
    // ||K v|| with ||v|| = 1 is the square root of the Rayleigh quotient.
    const double next = frobenius_norm(kv);
    const double wn = frobenius_norm(w);
    if (wn == 0.0) {
      throw Error("spectral_norm: start vector lies in the null space");
    }
    for (std::size_t i = 0; i < dim; ++i) v.data()[i] = w.data()[i] / wn;
    if (std::abs(next - estimate) <= tol * next) {
      // One more Rayleigh evaluation on the refreshed vector.
      if (right) {
        kernels::serial::gemm(k, v, kv);
      } else {
        kernels::serial::gemm_tn(k, v, kv);
      }
      return frobenius_norm(kv);
    }
    estimate = next;
  }
  throw ConvergenceError("spectral_norm: power iteration did not converge",
                         estimate);
}

Matrix abs_normal_matrix(std::size_t rows, std::size_t cols, double offset,
                         Engine& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(rows, cols);
  for (double& v : out.values()) v = std::abs(normal(engine)) + offset;
  return out;
}

std::pair<Matrix, Matrix> random_init(std::size_t n, std::size_t m,
                                      std::size_t r, double offset,
                                      RandomSeed seed) {
  if (!(offset > 0.0)) {
    throw Error("random_init: offset must be positive for strictly positive factors");
  }
  if (n == 0 || m == 0 || r == 0) throw Error("random_init: dims must be positive");
  Engine engine = make_engine(seed);
  Matrix w = abs_normal_matrix(n, r, offset, engine);
  Matrix h = abs_normal_matrix(r, m, offset, engine);
  return {std::move(w), std::move(h)};
}

}  // namespace klnmf
