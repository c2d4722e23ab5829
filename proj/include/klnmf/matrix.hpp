#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace klnmf {

/// Dual iterates may hold negative entries; everything else is data.
enum class Role { data, dual };

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0,
         Role role = Role::data);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values,
         Role role = Role::data);

  static Matrix from_rows(
      std::initializer_list<std::initializer_list<double>> rows,
      Role role = Role::data);
  static Matrix column(std::span<const double> values,
                       Role role = Role::data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  Role role() const noexcept { return role_; }
  void set_role(Role role) noexcept { role_ = role; }

  double& operator()(std::size_t i, std::size_t j) {
    return values_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return values_[i * cols_ + j];
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  std::span<double> row(std::size_t i) {
    return {values_.data() + i * cols_, cols_};
  }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }

  std::vector<double> column_copy(std::size_t j) const;

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.values_ == b.values_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  Role role_ = Role::data;
};

/// Seed for every random draw in the library.
struct RandomSeed {
  std::uint64_t value = 0;
};

using Engine = std::mt19937_64;

inline Engine make_engine(RandomSeed seed) { return Engine(seed.value); }

// Shape checks. Each throws klnmf::Error naming `what`.
void require_same_shape(const Matrix& a, const Matrix& b, const char* what);
void require_nonnegative(const Matrix& a, const char* what);
void require_finite(const Matrix& a, const char* what);

Matrix transpose(const Matrix& a);
/// A * B.
Matrix multiply(const Matrix& a, const Matrix& b);
/// A^T * B.
Matrix multiply_tn(const Matrix& a, const Matrix& b);
/// A * B^T.
Matrix multiply_nt(const Matrix& a, const Matrix& b);

std::vector<double> column_sums(const Matrix& a);
std::vector<double> row_sums(const Matrix& a);
double total_sum(const Matrix& a);
double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);
/// Elementwise max(a, floor).
Matrix floored(const Matrix& a, double floor);

constexpr double kSpectralTol = 1e-9;
constexpr std::size_t kSpectralMaxIter = 10000;

/// Largest singular value of K by power iteration on the smaller Gram side,
/// started from the normalized all-ones vector. Throws on an all-zero K and
/// ConvergenceError (carrying the last estimate) when max_iter is exhausted.
double spectral_norm(const Matrix& k, double tol = kSpectralTol,
                     std::size_t max_iter = kSpectralMaxIter);

constexpr double kDefaultInitOffset = 1e-2;

/// Matrix with entries |N(0,1)| + offset drawn from `engine` in row-major order.
Matrix abs_normal_matrix(std::size_t rows, std::size_t cols, double offset,
                         Engine& engine);

/// Strictly positive W0 (n x r) and H0 (r x m); W0 is drawn before H0.
std::pair<Matrix, Matrix> random_init(std::size_t n, std::size_t m,
                                      std::size_t r, double offset,
                                      RandomSeed seed);

}  // namespace klnmf
