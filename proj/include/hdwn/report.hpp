#ifndef HDWN_REPORT_HPP
#define HDWN_REPORT_HPP

#include <json.hpp>

#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "hdwn/error.hpp"
#include "hdwn/series.hpp"
#include "hdwn/statistics.hpp"

namespace hdwn {

struct Decisions {
  bool max = false;
  bool sum = false;
  bool fc = false;
};

/// Outcome of all three tests on one panel at level alpha.
struct TestReport {
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  int K = 1;
  double alpha = 0.05;
  MaxResult max;
  SumResult sum;
  double t_fc = 0.0;
  double fc_p_value = 1.0;
  Decisions decisions;
};

inline TestReport run_all(const TimeSeriesPanel& panel, int K, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidInput, "alpha = " + std::to_string(alpha) + " not in (0, 1)");
  TestReport r;
  r.n = panel.n();
  r.p = panel.p();
  r.K = K;
  r.alpha = alpha;
  r.max = t_max(panel, K);
  r.sum = t_sum(panel, K);
  const auto fc = fisher_combine(r.max.p_value, r.sum.p_value);
  r.t_fc = fc.t_fc;
  r.fc_p_value = fc.p_value;
  r.decisions = {r.max.p_value < alpha, r.sum.p_value < alpha, r.fc_p_value < alpha};
  return r;
}

// ---- serialization ---------------------------------------------------------

inline constexpr const char* kReportCsvHeader =
    "n,p,K,alpha,t_max,gumbel_y,p_max,t_sum,z,p_sum,t_fc,p_fc,rej_max,rej_sum,rej_fc";

inline std::string to_csv_record(const TestReport& r) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << r.n << ',' << r.p << ',' << r.K << ',' << r.alpha << ',' << r.max.t_max << ',' << r.max.gumbel_y << ','
     << r.max.p_value << ',' << r.sum.t_sum << ',' << r.sum.z_score << ',' << r.sum.p_value << ',' << r.t_fc << ','
     << r.fc_p_value << ',' << int(r.decisions.max) << ',' << int(r.decisions.sum) << ',' << int(r.decisions.fc);
  return os.str();
}

inline nlohmann::json to_json(const TestReport& r) {
  return {
      {"n", r.n},
      {"p", r.p},
      {"K", r.K},
      {"alpha", r.alpha},
      {"t_max", r.max.t_max},
      {"gumbel_y", r.max.gumbel_y},
      {"p_max", r.max.p_value},
      {"t_sum", r.sum.t_sum},
      {"trace_sq_hat", r.sum.trace_sq_hat},
      {"sigma_s_hat", r.sum.sigma_s_hat},
      {"z", r.sum.z_score},
      {"p_sum", r.sum.p_value},
      {"t_fc", r.t_fc},
      {"p_fc", r.fc_p_value},
      {"rej_max", r.decisions.max},
      {"rej_sum", r.decisions.sum},
      {"rej_fc", r.decisions.fc},
  };
}

}  // namespace hdwn

#endif  // HDWN_REPORT_HPP
