#ifndef HDWN_STATISTICS_HPP
#define HDWN_STATISTICS_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hdwn/distributions.hpp"
#include "hdwn/error.hpp"
#include "hdwn/series.hpp"

namespace hdwn {

// ---------------------------------------------------------------------------
// Max-type test
// ---------------------------------------------------------------------------

struct MaxResult {
  double t_max = 0.0;     // max_{k<=K, i, j} sqrt(n) |rho_ij(k)|
  double gumbel_y = 0.0;  // t_max^2 - 2 log(K p^2) + log log(K p^2)
  double p_value = 1.0;   // 1 - G(gumbel_y)
  int K = 1;
  Eigen::Index p_dim = 0;
  // location of the maximum (0-based component indices, lag in 1..K)
  int argmax_lag = 1;
  Eigen::Index argmax_row = 0;
  Eigen::Index argmax_col = 0;
};

/// Centring constant 2 log(K p^2) - log log(K p^2) of the extreme-value transform.
inline double max_test_centering(int K, Eigen::Index p) {
  const double l = std::log(static_cast<double>(K) * static_cast<double>(p) * static_cast<double>(p));
  return 2.0 * l - std::log(l);
}

inline void check_lag_budget(int K, Eigen::Index n) {
  if (K < 1 || K > n - 2)
    fail(ErrorCode::InvalidInput, "K = " + std::to_string(K) + " outside [1, n - 2 = " + std::to_string(n - 2) + "]");
}

inline MaxResult t_max(const TimeSeriesPanel& panel, int K) {
  const auto n = panel.n();
  const auto p = panel.p();
  check_lag_budget(K, n);
  if (p < 2) fail(ErrorCode::InvalidInput, "max-type test needs p >= 2");

  const Eigen::MatrixXd y = panel.data() * inverse_scales(panel).asDiagonal();
  MaxResult r;
  r.K = K;
  r.p_dim = p;
  double best = -1.0;
  for (int k = 1; k <= K; ++k) {
    const auto m = n - k;
    const Eigen::MatrixXd rho = y.bottomRows(m).transpose() * y.topRows(m);
    Eigen::Index i = 0, j = 0;
    const double top = rho.cwiseAbs().maxCoeff(&i, &j);
    if (top > best) {
      best = top;
      r.argmax_lag = k;
      r.argmax_row = i;
      r.argmax_col = j;
    }
  }
  const double nn = static_cast<double>(n);
  r.t_max = std::sqrt(nn) * (best / nn);
  r.gumbel_y = r.t_max * r.t_max - max_test_centering(K, p);
  r.p_value = gumbel_sf(r.gumbel_y);
  return r;
}

// ---------------------------------------------------------------------------
// Sum-type test
// ---------------------------------------------------------------------------

struct SumResult {
  double t_sum = 0.0;
  double trace_sq_hat = 0.0;  // unbiased estimate of tr(Sigma^2)
  double sigma_s_hat = 0.0;   // sqrt(2K / (n(n-1))) * trace_sq_hat
  double z_score = 0.0;
  double p_value = 0.5;       // 1 - Phi(z_score)
};

namespace detail {

/// Pairwise (tree) summation.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const auto half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace detail

/// Gram matrix g_ts = e_t^T e_s of the panel rows.
inline Eigen::MatrixXd gram_matrix(const TimeSeriesPanel& panel) {
  const auto& x = panel.data();
  Eigen::MatrixXd g(x.rows(), x.rows());
  g.setZero();
  g.selfadjointView<Eigen::Lower>().rankUpdate(x);
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

/// Off-diagonal U-statistic sum_{t != s} g(t, s) g(t + lag, s + lag) over
/// t, s < n - lag, reduced row-by-row then pairwise across rows.
inline double lagged_gram_sum(const Eigen::MatrixXd& g, Eigen::Index lag) {
  const auto m = g.rows() - lag;
  std::vector<double> rows(static_cast<std::size_t>(std::max<Eigen::Index>(m, 0)));
  for (Eigen::Index t = 0; t < m; ++t) {
    const auto a = g.col(t);
    const auto b = g.col(t + lag);
    double s = a.head(t).dot(b.segment(lag, t));
    const auto tail = m - t - 1;
    if (tail > 0) s += a.segment(t + 1, tail).dot(b.segment(t + 1 + lag, tail));
    rows[static_cast<std::size_t>(t)] = s;
  }
  return detail::pairwise_sum(rows);
}

/// (1/(n(n-1))) sum_{t != s} (e_t^T e_s)^2.
inline double trace_sq_estimate(const Eigen::MatrixXd& gram) {
  const double n = static_cast<double>(gram.rows());
  return lagged_gram_sum(gram, 0) / (n * (n - 1.0));
}

inline double trace_sq_estimate(const TimeSeriesPanel& panel) { return trace_sq_estimate(gram_matrix(panel)); }

inline SumResult t_sum(const TimeSeriesPanel& panel, int K) {
  const auto n = panel.n();
  if (n < 4) fail(ErrorCode::InvalidInput, "sum-type test needs n >= 4, got " + std::to_string(n));
  check_lag_budget(K, n);

  const Eigen::MatrixXd g = gram_matrix(panel);
  const double nn1 = static_cast<double>(n) * static_cast<double>(n - 1);
  SumResult r;
  double acc = 0.0;
  for (int l = 1; l <= K; ++l) acc += lagged_gram_sum(g, l);
  r.t_sum = acc / nn1;
  r.trace_sq_hat = lagged_gram_sum(g, 0) / nn1;
  if (!(r.trace_sq_hat > 0.0))
    fail(ErrorCode::DegenerateVariance, "trace estimate is zero (all distinct rows mutually orthogonal)");
  r.sigma_s_hat = std::sqrt(2.0 * K / nn1) * r.trace_sq_hat;
  r.z_score = r.t_sum / r.sigma_s_hat;
  r.p_value = std_normal_sf(r.z_score);
  return r;
}

// ---------------------------------------------------------------------------
// Fisher combination
// ---------------------------------------------------------------------------

struct FisherResult {
  double t_fc = 0.0;
  double p_value = 1.0;
};

inline constexpr double kMinLogP = 1e-300;

/// T_FC = -2 log p_max - 2 log p_sum, referred to chi-square(4).
inline FisherResult fisher_combine(double p_max, double p_sum) {
  for (double p : {p_max, p_sum})
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::InvalidProbability, "p-value " + std::to_string(p) + " outside [0, 1]");
  const auto clamp = [](double p) { return std::max(p, kMinLogP); };
  FisherResult r;
  r.t_fc = 0.0 - 2.0 * std::log(clamp(p_max)) - 2.0 * std::log(clamp(p_sum));
  r.p_value = chi2_4_sf(r.t_fc);
  return r;
}

}  // namespace hdwn

#endif  // HDWN_STATISTICS_HPP
