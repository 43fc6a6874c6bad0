#ifndef HDWN_SERIES_HPP
#define HDWN_SERIES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <utility>

#include "hdwn/csv.hpp"
#include "hdwn/error.hpp"

namespace hdwn {

/// Whether to subtract column means when a panel is constructed. The
/// statistics assume mean-zero input and never centre on their own.
enum class Centering { None, SubtractMean };

/// n observations (rows) of a p-dimensional series (columns). Immutable once
/// built; every entry is finite.
class TimeSeriesPanel {
 public:
  explicit TimeSeriesPanel(Eigen::MatrixXd data, Centering centering = Centering::None)
      : data_(std::move(data)) {
    if (data_.rows() < 2) fail(ErrorCode::InvalidData, "panel needs n >= 2 rows, got " + std::to_string(data_.rows()));
    if (data_.cols() < 1) fail(ErrorCode::InvalidData, "panel needs p >= 1 columns");
    for (Eigen::Index j = 0; j < data_.cols(); ++j)
      for (Eigen::Index i = 0; i < data_.rows(); ++i)
        if (!std::isfinite(data_(i, j)))
          fail(ErrorCode::InvalidData, "non-finite entry at row " + std::to_string(i + 1) + ", column " +
                                           std::to_string(j + 1));
    if (centering == Centering::SubtractMean) data_.rowwise() -= data_.colwise().mean();
  }

  Eigen::Index n() const noexcept { return data_.rows(); }
  Eigen::Index p() const noexcept { return data_.cols(); }
  const Eigen::MatrixXd& data() const noexcept { return data_; }

  /// Contiguous rows [first, first + length) as a new panel.
  TimeSeriesPanel window(Eigen::Index first, Eigen::Index length) const {
    return TimeSeriesPanel(data_.middleRows(first, length));
  }

  /// Columns [first, first + count) as a new panel.
  TimeSeriesPanel components(Eigen::Index first, Eigen::Index count) const {
    return TimeSeriesPanel(data_.middleCols(first, count));
  }

 private:
  Eigen::MatrixXd data_;
};

inline TimeSeriesPanel read_panel_csv(std::istream& in, bool has_header, Centering centering = Centering::None,
                                      const std::string& source = "<stream>") {
  auto table = csv::read(in, {.has_header = has_header, .leading_label_column = false}, source);
  return TimeSeriesPanel(std::move(table.values), centering);
}

inline TimeSeriesPanel read_panel_csv(const std::string& path, bool has_header, Centering centering = Centering::None) {
  auto table = csv::read_file(path, {.has_header = has_header, .leading_label_column = false});
  return TimeSeriesPanel(std::move(table.values), centering);
}

inline void write_panel_csv(std::ostream& out, const TimeSeriesPanel& panel) { csv::write(out, panel.data()); }

/// A p x p matrix tagged with the lag it was computed at.
struct LaggedMatrix {
  Eigen::Index lag = 0;
  Eigen::MatrixXd values;
};

/// Sample autocovariance at lag k with divisor n (not n - k):
///   S(k) = (1/n) sum_{t=1}^{n-k} e_{t+k} e_t^T.
/// Entry (i, j) pairs component i at time t + k with component j at time t.
inline LaggedMatrix sample_autocovariance(const TimeSeriesPanel& panel, Eigen::Index k) {
  const auto n = panel.n();
  if (k < 0 || k >= n)
    fail(ErrorCode::LagTooLarge, "lag " + std::to_string(k) + " outside [0, " + std::to_string(n - 1) + "]");
  const auto& x = panel.data();
  const auto m = n - k;
  Eigen::MatrixXd s = x.bottomRows(m).transpose() * x.topRows(m);
  s /= static_cast<double>(n);
  return {k, std::move(s)};
}

inline constexpr double kDegenerateVariance = 1e-12;

/// Reciprocal square roots of diag S(0), checking every column has spread.
inline Eigen::VectorXd inverse_scales(const TimeSeriesPanel& panel) {
  const auto& x = panel.data();
  const double n = static_cast<double>(panel.n());
  Eigen::VectorXd inv(panel.p());
  for (Eigen::Index j = 0; j < panel.p(); ++j) {
    const double var = x.col(j).squaredNorm() / n;
    if (!(var > kDegenerateVariance))
      fail(ErrorCode::DegenerateVariance, "column " + std::to_string(j + 1) + " has second moment " +
                                              std::to_string(var) + " <= 1e-12");
    inv(j) = 1.0 / std::sqrt(var);
  }
  return inv;
}

/// Sample autocorrelation diag{S(0)}^{-1/2} S(k) diag{S(0)}^{-1/2}.
inline LaggedMatrix sample_autocorrelation(const TimeSeriesPanel& panel, Eigen::Index k) {
  const auto inv = inverse_scales(panel);
  auto cov = sample_autocovariance(panel, k);
  cov.values = inv.asDiagonal() * cov.values * inv.asDiagonal();
  if (k == 0) cov.values.diagonal().setOnes();
  return cov;
}

}  // namespace hdwn

#endif  // HDWN_SERIES_HPP
