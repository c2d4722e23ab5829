#pragma once

#include <algorithm>
#include <cmath>

namespace klnmf {

/// 1/2 (y - sqrt(y^2 + 4 sigma a)). For y > 0 the equivalent form
/// -2 sigma a / (y + sqrt(...)) avoids cancellation, so the result stays
/// strictly negative whenever sigma * a > 0.
inline double prox_f_star_scalar(double y, double sigma, double a) {
  const double s = std::sqrt(y * y + 4.0 * sigma * a);
  if (y > 0.0) return -2.0 * sigma * a / (y + s);
  return 0.5 * (y - s);
}

inline double prox_g_scalar(double x, double tau, double col_sum) {
  return std::max(x - tau * col_sum, 0.0);
}

/// One generalized-KL term with the 0 log 0 convention. Returns NaN when the
/// term is undefined (v > 0, p <= 0).
inline double kl_term(double v, double p) {
  if (v == 0.0) return p;
  if (!(p > 0.0)) return std::nan("");
  return -v * (std::log(p / v) + 1.0) + p;
}

}  // namespace klnmf
