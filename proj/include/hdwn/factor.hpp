#ifndef HDWN_FACTOR_HPP
#define HDWN_FACTOR_HPP

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "hdwn/csv.hpp"
#include "hdwn/error.hpp"
#include "hdwn/harness.hpp"
#include "hdwn/report.hpp"
#include "hdwn/series.hpp"

namespace hdwn {

/// Excess returns of p assets and the three factors (market excess, SMB, HML)
/// over the same T periods.
struct FactorData {
  Eigen::MatrixXd excess_returns;  // T x p
  Eigen::MatrixXd factors;         // T x 3
  std::vector<std::string> dates;  // optional, carried through for reports

  Eigen::Index T() const { return excess_returns.rows(); }
  Eigen::Index p() const { return excess_returns.cols(); }

  void validate() const {
    if (factors.cols() != 3) fail(ErrorCode::ShapeMismatch, "factors must have 3 columns, got " + std::to_string(factors.cols()));
    if (excess_returns.rows() != factors.rows())
      fail(ErrorCode::ShapeMismatch, "returns have " + std::to_string(excess_returns.rows()) + " rows, factors " +
                                         std::to_string(factors.rows()));
    if (T() < 10) fail(ErrorCode::InvalidData, "need T >= 10 periods, got " + std::to_string(T()));
    if (p() < 1) fail(ErrorCode::InvalidData, "no asset columns");
    if (!excess_returns.allFinite() || !factors.allFinite()) fail(ErrorCode::InvalidData, "non-finite entries");
    for (Eigen::Index j = 0; j < 3; ++j) {
      const auto col = factors.col(j);
      if ((col.array() - col.mean()).matrix().squaredNorm() <= 0.0)
        fail(ErrorCode::InvalidData, "factor column " + std::to_string(j + 1) + " is constant");
    }
  }
};

inline constexpr double kRankTolerance = 1e-10;

/// Residuals of p separate regressions of each column of `returns` on
/// [1, factors], solved by column-pivoted QR. Needs only a full-rank design;
/// the T >= 10 pipeline requirement lives in FactorData.
inline Eigen::MatrixXd ols_fit_residuals(const Eigen::MatrixXd& returns, const Eigen::MatrixXd& factors) {
  if (returns.rows() != factors.rows())
    fail(ErrorCode::ShapeMismatch, "returns have " + std::to_string(returns.rows()) + " rows, factors " +
                                       std::to_string(factors.rows()));
  if (!returns.allFinite() || !factors.allFinite()) fail(ErrorCode::InvalidData, "non-finite entries");
  const auto T = returns.rows();
  const auto k = factors.cols() + 1;
  Eigen::MatrixXd design(T, k);
  design.col(0).setOnes();
  design.rightCols(k - 1) = factors;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(kRankTolerance);
  if (qr.rank() < k)
    fail(ErrorCode::RankDeficient, "design [1, factors] has rank " + std::to_string(qr.rank()) + " < " + std::to_string(k));
  return returns - design * qr.solve(returns);
}

inline TimeSeriesPanel ols_residuals(const FactorData& data) {
  data.validate();
  return TimeSeriesPanel(ols_fit_residuals(data.excess_returns, data.factors));
}

/// Reads a returns CSV (date, asset columns) and a factors CSV
/// (date, market excess, SMB, HML, risk-free). Rows are aligned by order.
/// Unless `already_excess`, the risk-free column is subtracted from returns.
inline FactorData load_factor_data(const std::string& returns_path, const std::string& factors_path,
                                   bool already_excess = false, bool check_dates = false) {
  const csv::ReadOptions opt{.has_header = true, .leading_label_column = true};
  auto returns = csv::read_file(returns_path, opt);
  auto factors = csv::read_file(factors_path, opt);
  if (factors.values.cols() != 4)
    fail(ErrorCode::InvalidData, factors_path + ": expected date + 4 numeric columns (mkt-rf, SMB, HML, RF), got " +
                                     std::to_string(factors.values.cols()));
  if (returns.values.rows() != factors.values.rows())
    fail(ErrorCode::ShapeMismatch, "returns have " + std::to_string(returns.values.rows()) + " rows, factors " +
                                       std::to_string(factors.values.rows()));
  if (check_dates) {
    for (std::size_t i = 0; i < returns.labels.size(); ++i)
      if (returns.labels[i] != factors.labels[i])
        fail(ErrorCode::InvalidData, "date mismatch at data row " + std::to_string(i + 1) + ": '" + returns.labels[i] +
                                         "' vs '" + factors.labels[i] + "'");
  }
  FactorData data;
  data.factors = factors.values.leftCols(3);
  data.excess_returns = returns.values;
  if (!already_excess) data.excess_returns.colwise() -= factors.values.col(3);
  data.dates = std::move(returns.labels);
  data.validate();
  return data;
}

struct SlidingWindowSummary {
  Eigen::Index window_length = 0;
  int K = 1;
  double alpha = 0.05;
  Eigen::Index num_windows = 0;
  TestRates rejection_rate;
};

/// Runs all three tests on every window [tau, tau + n) for tau = 0 .. T - n - 1
/// (T - n windows) and reports the fraction of windows rejected by each test.
inline SlidingWindowSummary sliding_window_rates(const TimeSeriesPanel& panel, Eigen::Index window, int K, double alpha,
                                                 unsigned workers = 1) {
  const auto T = panel.n();
  if (window < 10) fail(ErrorCode::InvalidInput, "window length " + std::to_string(window) + " < 10");
  if (window >= T)
    fail(ErrorCode::WindowTooLong, "window length " + std::to_string(window) + " >= T = " + std::to_string(T));
  SlidingWindowSummary s;
  s.window_length = window;
  s.K = K;
  s.alpha = alpha;
  s.num_windows = T - window;
  std::vector<Decisions> decisions(static_cast<std::size_t>(s.num_windows));
  parallel_for(static_cast<int>(s.num_windows), workers, [&](int tau) {
    decisions[static_cast<std::size_t>(tau)] = run_all(panel.window(tau, window), K, alpha).decisions;
  });
  long long rm = 0, rs = 0, rf = 0;
  for (const auto& d : decisions) {
    rm += d.max;
    rs += d.sum;
    rf += d.fc;
  }
  const double w = static_cast<double>(s.num_windows);
  s.rejection_rate = {rm / w, rs / w, rf / w};
  return s;
}

inline nlohmann::json to_json(const SlidingWindowSummary& s) {
  return {{"window_length", s.window_length},
          {"K", s.K},
          {"alpha", s.alpha},
          {"num_windows", s.num_windows},
          {"rate", {{"max", s.rejection_rate.max}, {"sum", s.rejection_rate.sum}, {"fc", s.rejection_rate.fc}}}};
}

}  // namespace hdwn

#endif  // HDWN_FACTOR_HPP
