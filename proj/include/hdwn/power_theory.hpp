#ifndef HDWN_POWER_THEORY_HPP
#define HDWN_POWER_THEORY_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>

#include "hdwn/distributions.hpp"
#include "hdwn/error.hpp"
#include "hdwn/linalg.hpp"
#include "hdwn/statistics.hpp"

namespace hdwn {

/// Inputs for the sum-test power under e_t = A0 z_t + A1 z_{t-1} with K = 1.
/// `n` doubles as the sample-size symbol T of the variance expansion.
struct PowerInputs {
  Eigen::MatrixXd A0;
  Eigen::MatrixXd A1;
  Eigen::Index n = 200;
  double nu4 = 3.0;  // E z^4 of the innovations
  double alpha = 0.05;

  void validate() const {
    if (A0.rows() != A0.cols() || A1.rows() != A1.cols() || A0.rows() != A1.rows())
      fail(ErrorCode::ShapeMismatch, "A0 and A1 must be square and of equal size");
    if (A0.rows() < 1) fail(ErrorCode::ShapeMismatch, "empty coefficient matrices");
    if (!(nu4 >= 1.0)) fail(ErrorCode::InvalidInput, "nu4 = " + std::to_string(nu4) + " < 1");
    if (n < 2) fail(ErrorCode::InvalidInput, "n < 2");
    if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidInput, "alpha not in (0, 1)");
  }
};

/// Products entering the power formulas: S0 = A0'A0, S1 = A1'A1, S01 = A0'A1.
struct CrossMoments {
  Eigen::MatrixXd s0;
  Eigen::MatrixXd s1;
  Eigen::MatrixXd s01;
  double T = 0.0;
  double nu4 = 3.0;

  explicit CrossMoments(const PowerInputs& in)
      : s0(in.A0.transpose() * in.A0),
        s1(in.A1.transpose() * in.A1),
        s01(in.A0.transpose() * in.A1),
        T(static_cast<double>(in.n)),
        nu4(in.nu4) {}
};

/// The summands of sigma^2_S1, one function each. Names give the coefficient
/// and the trace pattern.
namespace sum_variance_terms {

inline double sq(double x) { return x * x; }

// 2/T^2 tr^2(S0^2 + S1^2)
inline double t01_two_tr2_s0sq_plus_s1sq(const CrossMoments& c) {
  return 2.0 / sq(c.T) * sq((c.s0 * c.s0 + c.s1 * c.s1).trace());
}
// 6/T^2 tr^2(S0 S1)
inline double t02_six_tr2_s0s1(const CrossMoments& c) { return 6.0 / sq(c.T) * sq(trace_product(c.s0, c.s1)); }
// 4/T [2 tr{(S0 S1)^2} + (nu4 - 3) tr{D^2(S0 S1)}]
inline double t03_four_tr_s0s1_squared_kurtosis(const CrossMoments& c) {
  const Eigen::MatrixXd prod = c.s0 * c.s1;
  const double d2 = prod.diagonal().squaredNorm();
  return 4.0 / c.T * (2.0 * trace_product(prod, prod) + (c.nu4 - 3.0) * d2);
}
// 8/T^2 tr(S01 S01') tr(S0^2 + S1^2)
inline double t04_eight_tr_s01s01t_tr_s0sq_plus_s1sq(const CrossMoments& c) {
  return 8.0 / sq(c.T) * c.s01.squaredNorm() * (c.s0 * c.s0 + c.s1 * c.s1).trace();
}
// 16/T^2 tr(S01 S1) tr(S01 S0)
inline double t05_sixteen_tr_s01s1_tr_s01s0(const CrossMoments& c) {
  return 16.0 / sq(c.T) * trace_product(c.s01, c.s1) * trace_product(c.s01, c.s0);
}
// 16/T^2 tr(S0 + S1) {tr(S01' S01 S0) + tr(S01 S01' S1)}
inline double t06_sixteen_tr_s0_plus_s1(const CrossMoments& c) {
  const double a = trace_product(c.s01.transpose() * c.s01, c.s0);
  const double b = trace_product(c.s01 * c.s01.transpose(), c.s1);
  return 16.0 / sq(c.T) * (c.s0.trace() + c.s1.trace()) * (a + b);
}
// 16/T^2 tr(S01) {tr(S0^2 S01') + tr(S1^2 S01) + 2 tr(S1 S01 S0)}
inline double t07_sixteen_tr_s01_cubic(const CrossMoments& c) {
  const double a = trace_product(c.s0 * c.s0, c.s01.transpose());
  const double b = trace_product(c.s1 * c.s1, c.s01);
  const double d = trace_product(c.s1 * c.s01, c.s0);
  return 16.0 / sq(c.T) * c.s01.trace() * (a + b + 2.0 * d);
}
// 4/T tr(S01' S01 S0^2 + S01 S01' S1^2 + 2 S01' S1 S01 S0)
inline double t08_four_tr_quartic_mixed(const CrossMoments& c) {
  const double a = trace_product(c.s01.transpose() * c.s01, c.s0 * c.s0);
  const double b = trace_product(c.s01 * c.s01.transpose(), c.s1 * c.s1);
  const double d = trace_product(c.s01.transpose() * c.s1, c.s01 * c.s0);
  return 4.0 / c.T * (a + b + 2.0 * d);
}
// 4/T tr(S01 S01' S01' S01)
inline double t09_four_tr_s01_quartic(const CrossMoments& c) {
  return 4.0 / c.T * trace_product(c.s01 * c.s01.transpose(), c.s01.transpose() * c.s01);
}
// 12/T^2 tr^2(S01 S01')
inline double t10_twelve_tr2_s01s01t(const CrossMoments& c) { return 12.0 / sq(c.T) * sq(c.s01.squaredNorm()); }
// 16/T^2 tr(S01) tr(S01 S01' S01')
inline double t11_sixteen_tr_s01_tr_s01_cubic(const CrossMoments& c) {
  return 16.0 / sq(c.T) * c.s01.trace() * trace_product(c.s01 * c.s01.transpose(), c.s01.transpose());
}
// 4/T^2 tr^2(S0 S01)
inline double t12_four_tr2_s0s01(const CrossMoments& c) { return 4.0 / sq(c.T) * sq(trace_product(c.s0, c.s01)); }
// 4/T^2 tr^2(S1 S01)
inline double t13_four_tr2_s1s01(const CrossMoments& c) { return 4.0 / sq(c.T) * sq(trace_product(c.s1, c.s01)); }

inline constexpr int kCount = 13;

inline std::array<double, kCount> all(const CrossMoments& c) {
  return {t01_two_tr2_s0sq_plus_s1sq(c),        t02_six_tr2_s0s1(c),
          t03_four_tr_s0s1_squared_kurtosis(c), t04_eight_tr_s01s01t_tr_s0sq_plus_s1sq(c),
          t05_sixteen_tr_s01s1_tr_s01s0(c),     t06_sixteen_tr_s0_plus_s1(c),
          t07_sixteen_tr_s01_cubic(c),          t08_four_tr_quartic_mixed(c),
          t09_four_tr_s01_quartic(c),           t10_twelve_tr2_s01s01t(c),
          t11_sixteen_tr_s01_tr_s01_cubic(c),   t12_four_tr2_s0s01(c),
          t13_four_tr2_s1s01(c)};
}

}  // namespace sum_variance_terms

struct SumPowerBreakdown {
  double mu_s = 0.0;
  double sigma_s1 = 0.0;
  double xi0 = 0.0;  // probability limit of the trace estimate under the alternative
  double z_alpha = 0.0;
  double beta_sum = 0.0;
  std::array<double, sum_variance_terms::kCount> variance_terms{};
};

/// Asymptotic mean, standard deviation and power of the sum test (K = 1) under
/// a VMA(1) alternative. The o(sigma^2) remainder of the variance is dropped.
inline SumPowerBreakdown sum_power(const PowerInputs& in) {
  in.validate();
  const CrossMoments c(in);
  SumPowerBreakdown out;
  out.mu_s = trace_product(c.s0, c.s1) + 2.0 / c.T * sum_variance_terms::sq(c.s01.trace());
  out.variance_terms = sum_variance_terms::all(c);
  double var = 0.0;
  for (double t : out.variance_terms) var += t;
  if (!(var > 0.0)) fail(ErrorCode::DegenerateVariance, "sigma^2_S1 is not positive");
  out.sigma_s1 = std::sqrt(var);
  out.xi0 = (c.s0 * c.s0 + c.s1 * c.s1).trace() + 2.0 * c.s01.squaredNorm();
  out.z_alpha = std_normal_quantile(1.0 - in.alpha);
  out.beta_sum =
      std_normal_cdf(out.mu_s / out.sigma_s1 - out.z_alpha * std::sqrt(2.0) / c.T * out.xi0 / out.sigma_s1);
  return out;
}

// ---------------------------------------------------------------------------
// Max test
// ---------------------------------------------------------------------------

struct PowerBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// x_alpha = 2 log(K p^2) - log log(K p^2) + q_alpha.
inline double max_threshold(Eigen::Index p, int K, double alpha) {
  return max_test_centering(K, p) + gumbel_critical_value(alpha);
}

/// Power sandwich for one component following e_t1 = z_t1 + rho z_{t-1,1}:
///   lower = Phi(sqrt(n) rho - sqrt(x_alpha)) + Phi(-sqrt(n) rho - sqrt(x_alpha)),
///   upper = lower + alpha, both clipped to [0, 1].
inline PowerBounds max_power_bounds(double rho, Eigen::Index n, Eigen::Index p, int K, double alpha) {
  if (p < 2 || K < 1 || n < 2 || !(alpha > 0.0 && alpha < 1.0) || !std::isfinite(rho))
    fail(ErrorCode::InvalidInput, "max_power_bounds: need p >= 2, K >= 1, n >= 2, alpha in (0, 1)");
  const double root_x = std::sqrt(max_threshold(p, K, alpha));
  const double shift = std::sqrt(static_cast<double>(n)) * std::abs(rho);
  const double lower = std_normal_cdf(shift - root_x) + std_normal_cdf(-shift - root_x);
  return {std::clamp(lower, 0.0, 1.0), std::clamp(lower + alpha, 0.0, 1.0)};
}

/// True iff max over lags and i < j of |rho_ij(k)| reaches b0 sqrt(log p / n).
/// Ties count as detectable.
inline bool theorem2_signal_check(std::span<const Eigen::MatrixXd> gammas, Eigen::Index n, double b0) {
  if (gammas.empty()) fail(ErrorCode::InvalidInput, "theorem2_signal_check: empty list of autocorrelations");
  const auto p = gammas.front().rows();
  double best = 0.0;
  for (const auto& g : gammas) {
    if (g.rows() != p || g.cols() != p) fail(ErrorCode::ShapeMismatch, "autocorrelation matrices differ in shape");
    for (Eigen::Index i = 0; i < p; ++i)
      for (Eigen::Index j = i + 1; j < p; ++j) best = std::max(best, std::abs(g(i, j)));
  }
  return best >= b0 * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

}  // namespace hdwn

#endif  // HDWN_POWER_THEORY_HPP
