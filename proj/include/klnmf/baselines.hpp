#pragma once

// Reference NMF solvers used for benchmarking: Lee-Seung multiplicative
// updates and the KL ADMM splitting with variables X = YZ, Y = W, Z = H.

#include <optional>
#include <string_view>
#include <utility>

#include "klnmf/fpa.hpp"
#include "klnmf/matrix.hpp"
#include "klnmf/trace.hpp"

namespace klnmf {

/// Floor applied to MU denominators and model entries, and to factors when
/// evaluating the ADMM objective.
constexpr double kFloorEps = 1e-16;

/// Which factor a baseline treats as fixed; `none` is full NMF.
enum class Fixed { none, w, h };

/// One multiplicative update of W then H (H uses the updated W).
std::pair<Matrix, Matrix> mu_step(const Matrix& v, const Matrix& w,
                                  const Matrix& h, Fixed fixed = Fixed::none);

struct AdmmState {
  Matrix x;        // n x m
  Matrix y;        // n x r
  Matrix z;        // r x m
  Matrix w;        // n x r, >= 0
  Matrix h;        // r x m, >= 0
  Matrix alpha_x;  // scaled duals, same shapes as x, y, z
  Matrix alpha_y;
  Matrix alpha_z;
  double rho = 1.0;

  /// Y = W = W0, Z = H = H0, X = W0 H0, zero multipliers.
  static AdmmState start(const Matrix& w0, const Matrix& h0, double rho);
};

/// Closed-form minimizer of the X subproblem, elementwise:
/// ((rho P - alpha - 1) + sqrt((rho P - alpha - 1)^2 + 4 rho V)) / (2 rho)
/// with P = YZ.
Matrix admm_x_update(const Matrix& v, const Matrix& yz, const Matrix& alpha_x,
                     double rho);

/// One ADMM sweep in the order Y, Z, X, W, H, then the three duals. The
/// fixed factor's primal and dual blocks are skipped in ND mode.
AdmmState admm_step(const Matrix& v, AdmmState state, Fixed fixed = Fixed::none);

/// D(V || max(W, eps) max(H, eps)).
double admm_objective(const Matrix& v, const AdmmState& state);

enum class Method { mu, admm, fpa };

std::string_view method_name(Method method);
Method parse_method(std::string_view name);

struct RunResult {
  Matrix w;
  Matrix h;
  ConvergenceTrace trace;
  std::size_t repairs = 0;
};

/// Runs one method with shared accounting: one MU or ADMM iteration is one
/// data access, one FPA outer iteration is `iter_nd` accesses. Rows are
/// recorded at 0 and every iter_nd * trace_stride accesses (and at the end),
/// so all methods share a grid. `rho` is required for ADMM.
///
/// With `fixed` set, the named factor stays at its starting value and the
/// run solves the convex decomposition for the other one; every iteration is
/// then one access, the grid step is trace_stride, and FPA rows carry
/// certificates.
RunResult solver_driver(Method method, const Matrix& v, const Matrix& w0,
                        const Matrix& h0, const SolveConfig& cfg,
                        std::optional<double> rho = std::nullopt,
                        Fixed fixed = Fixed::none);

}  // namespace klnmf
