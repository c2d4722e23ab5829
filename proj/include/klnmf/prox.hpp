#pragma once

#include <span>
#include <vector>

#include "klnmf/matrix.hpp"
#include "klnmf/prox_scalar.hpp"

namespace klnmf {

// Step arguments are either a single value applied to every column or one
// value per column of the operand.

/// prox of sigma F*: 1/2 (y - sqrt(y o y + 4 sigma a)), elementwise.
Matrix prox_f_star(const Matrix& y, std::span<const double> sigma,
                   const Matrix& a);
Matrix prox_f_star(const Matrix& y, double sigma, const Matrix& a);

/// prox of tau G: (x - tau K^T 1)_+, with K^T 1 given as `col_sums`.
Matrix prox_g(const Matrix& x, std::span<const double> tau,
              std::span<const double> col_sums);
Matrix prox_g(const Matrix& x, double tau, std::span<const double> col_sums);

/// Euclidean projection onto {u >= 0, sum u = 1} by sort and threshold.
std::vector<double> project_simplex(std::span<const double> v);

/// Column-wise project_simplex(x - tau K^T 1). tau may be zero.
Matrix prox_g_simplex(const Matrix& x, std::span<const double> tau,
                      std::span<const double> col_sums);
Matrix prox_g_simplex(const Matrix& x, double tau,
                      std::span<const double> col_sums);

}  // namespace klnmf
