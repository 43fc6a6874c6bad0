#ifndef HDWN_DISTRIBUTIONS_HPP
#define HDWN_DISTRIBUTIONS_HPP

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hdwn/error.hpp"

namespace hdwn {

inline void require_probability(double u, const char* what) {
  if (!(u > 0.0 && u < 1.0)) fail(ErrorCode::InvalidProbability, std::string(what) + ": " + std::to_string(u) + " not in (0, 1)");
}

// ---- standard normal -------------------------------------------------------

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Upper tail 1 - Phi(x), accurate far into the tail.
inline double std_normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

inline double std_normal_quantile(double u) {
  require_probability(u, "std_normal_quantile");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

// ---- Gumbel-type limit G(y) = exp(-pi^{-1/2} exp(-y/2)) --------------------

inline constexpr double kInvSqrtPi = std::numbers::inv_sqrtpi;

inline double gumbel_cdf(double y) { return std::exp(-kInvSqrtPi * std::exp(-y / 2.0)); }

/// 1 - G(y), computed without cancellation for large y.
inline double gumbel_sf(double y) { return -std::expm1(-kInvSqrtPi * std::exp(-y / 2.0)); }

/// G^{-1}(u).
inline double gumbel_quantile(double u) {
  require_probability(u, "gumbel_quantile");
  return -2.0 * std::log(-std::sqrt(std::numbers::pi) * std::log(u));
}

/// q_alpha, the upper-alpha point: G(q_alpha) = 1 - alpha.
inline double gumbel_critical_value(double alpha) {
  require_probability(alpha, "gumbel_critical_value");
  return -2.0 * std::log(-std::sqrt(std::numbers::pi) * std::log1p(-alpha));
}

// ---- chi-square with 4 degrees of freedom ----------------------------------

inline double chi2_4_sf(double x) {
  if (x < 0.0) fail(ErrorCode::InvalidInput, "chi2_4: negative argument " + std::to_string(x));
  return (1.0 + x / 2.0) * std::exp(-x / 2.0);
}

inline double chi2_4_cdf(double x) {
  if (x < 0.0) fail(ErrorCode::InvalidInput, "chi2_4: negative argument " + std::to_string(x));
  // 1 - (1 + h) e^{-h} = -expm1(-h) - h e^{-h}
  const double h = x / 2.0;
  return -std::expm1(-h) - h * std::exp(-h);
}

/// Inverse of chi2_4_cdf by Newton iteration on the closed form, guarded by a
/// shrinking bracket.
inline double chi2_4_quantile(double u) {
  require_probability(u, "chi2_4_quantile");
  double lo = 0.0;
  double hi = 2.0;
  while (chi2_4_cdf(hi) < u) hi *= 2.0;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = chi2_4_cdf(x) - u;
    if (f < 0.0) lo = x; else hi = x;
    const double density = x / 4.0 * std::exp(-x / 2.0);
    double next = density > 0.0 ? x - f / density : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, x)) return next;
    x = next;
  }
  return x;
}

/// c_alpha, the upper-alpha point of chi-square(4).
inline double chi2_4_critical_value(double alpha) {
  require_probability(alpha, "chi2_4_critical_value");
  return chi2_4_quantile(1.0 - alpha);
}

}  // namespace hdwn

#endif  // HDWN_DISTRIBUTIONS_HPP
