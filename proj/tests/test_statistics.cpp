#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "hdwn/dgp.hpp"
#include "hdwn/report.hpp"
#include "hdwn/statistics.hpp"
#include "oracles.hpp"

using namespace hdwn;

namespace {

Eigen::MatrixXd gaussian(Eigen::Index n, Eigen::Index p, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Eigen::MatrixXd m(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) m(i, j) = d(rng);
  return m;
}

double rel_err(double got, double want, double scale) {
  return std::abs(got - want) / std::max({std::abs(want), scale, 1e-300});
}

}  // namespace

// ---- max-type --------------------------------------------------------------

TEST(TMax, NullSignalPanel) {
  // Column j is nonzero only at row 2j, so every lag-1 product vanishes.
  const int p = 10;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2 * p, p);
  for (int j = 0; j < p; ++j) x(2 * j, j) = 1.0 + j;
  const auto r = t_max(TimeSeriesPanel(x), 1);
  EXPECT_EQ(r.t_max, 0.0);
  const double l = std::log(100.0);
  EXPECT_NEAR(r.gumbel_y, -2.0 * l + std::log(l), 1e-12);
  EXPECT_GT(r.p_value, 1.0 - 1e-10);
}

TEST(TMax, SmallHandPanel) {
  Eigen::MatrixXd x(4, 2);
  x << 1, 0, 0, 1, -1, 0, 0, -1;
  const auto r = t_max(TimeSeriesPanel(x), 1);
  // rho(1) = [[0, -1/2], [1, 0]] by hand, so t_max = sqrt(4) * 1.
  EXPECT_NEAR(r.t_max, 2.0, 1e-14);
  EXPECT_NEAR(r.t_max, oracle::t_max(x, 1), 1e-14);
  EXPECT_EQ(r.argmax_row, 1);
  EXPECT_EQ(r.argmax_col, 0);
}

TEST(TMax, ResultInvariants) {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 30; ++rep) {
    const auto r = t_max(TimeSeriesPanel(gaussian(40, 6, rng)), 2);
    EXPECT_GE(r.t_max, 0.0);
    EXPECT_NEAR(r.p_value, 1.0 - gumbel_cdf(r.gumbel_y), 1e-12);
    EXPECT_EQ(r.K, 2);
    EXPECT_EQ(r.p_dim, 6);
  }
}

TEST(TMax, PValueDecreasesInStatistic) {
  // p-value as a function of t_max at fixed (K, p) via the same transform.
  double prev = 2.0;
  for (double t = 0.0; t < 8.0; t += 0.05) {
    const double pv = gumbel_sf(t * t - max_test_centering(2, 30));
    EXPECT_LE(pv, prev);
    prev = pv;
  }
}

TEST(TMax, PreconditionErrors) {
  std::mt19937_64 rng(4);
  const TimeSeriesPanel panel(gaussian(10, 3, rng));
  EXPECT_THROW(t_max(panel, 0), Error);
  EXPECT_THROW(t_max(panel, 9), Error);
  EXPECT_NO_THROW(t_max(panel, 8));
  EXPECT_THROW(t_max(TimeSeriesPanel(gaussian(10, 1, rng)), 1), Error);
  Eigen::MatrixXd degenerate = gaussian(10, 3, rng);
  degenerate.col(2).setZero();
  try {
    t_max(TimeSeriesPanel(degenerate), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateVariance);
  }
}

TEST(TMax, ScaleInvariance) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> c(0.001, 1000.0);
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::MatrixXd x = gaussian(30, 5, rng);
    const double base = t_max(TimeSeriesPanel(x), 3).t_max;
    x.col(rep % 5) *= c(rng);
    EXPECT_LT(std::abs(t_max(TimeSeriesPanel(x), 3).t_max - base), 1e-10);
  }
}

// ---- sum-type --------------------------------------------------------------

TEST(TSum, VanishingProducts) {
  // Rows e1, e1, e2, e2, e3, e3: the only nonzero g(t, s) with t != s pair
  // rows of one block, and shifting by one lag always leaves that block.
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(6, 3);
  for (int t = 0; t < 6; ++t) x(t, t / 2) = 1.0;
  const auto r = t_sum(TimeSeriesPanel(x), 1);
  EXPECT_EQ(r.t_sum, 0.0);
  EXPECT_GT(r.trace_sq_hat, 0.0);
  EXPECT_EQ(r.z_score, 0.0);
  EXPECT_DOUBLE_EQ(r.p_value, 0.5);
}

TEST(TSum, IntegerPanelMatchesOracleExactly) {
  Eigen::MatrixXd x(5, 2);
  x << 1, 2, -1, 3, 0, 1, 2, -2, 1, 1;
  const auto r = t_sum(TimeSeriesPanel(x), 1);
  const auto o = oracle::t_sum(x, 1);
  EXPECT_EQ(r.t_sum, o.t_sum);
  EXPECT_EQ(r.trace_sq_hat, o.trace_sq);
}

TEST(TSum, IdenticalUnitRows) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(7, 3);
  x.col(0).setOnes();
  EXPECT_DOUBLE_EQ(trace_sq_estimate(TimeSeriesPanel(x)), 1.0);
}

TEST(TSum, ResultInvariants) {
  std::mt19937_64 rng(12);
  for (int K = 1; K <= 3; ++K) {
    const auto r = t_sum(TimeSeriesPanel(gaussian(50, 20, rng)), K);
    EXPECT_NEAR(r.sigma_s_hat, std::sqrt(2.0 * K / (50.0 * 49.0)) * r.trace_sq_hat, 1e-12 * r.sigma_s_hat);
    EXPECT_NEAR(r.p_value, 1.0 - std_normal_cdf(r.z_score), 1e-12);
    EXPECT_GT(r.sigma_s_hat, 0.0);
  }
}

TEST(TSum, PreconditionErrors) {
  std::mt19937_64 rng(13);
  EXPECT_THROW(t_sum(TimeSeriesPanel(gaussian(3, 2, rng)), 1), Error);
  const TimeSeriesPanel panel(gaussian(8, 2, rng));
  EXPECT_THROW(t_sum(panel, 0), Error);
  EXPECT_THROW(t_sum(panel, 7), Error);
  // every distinct pair of rows orthogonal: no variance estimate
  try {
    t_sum(TimeSeriesPanel(Eigen::MatrixXd::Identity(5, 5)), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateVariance);
  }
}

TEST(TSum, RotationInvariance) {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::MatrixXd x = gaussian(25, 6, rng);
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian(6, 6, rng)).householderQ();
    const auto a = t_sum(TimeSeriesPanel(x), 2);
    const auto b = t_sum(TimeSeriesPanel(x * q.transpose()), 2);  // rows e_t -> Q e_t
    EXPECT_LT(rel_err(b.t_sum, a.t_sum, 1e-3 * a.trace_sq_hat), 1e-8);
    EXPECT_LT(rel_err(b.trace_sq_hat, a.trace_sq_hat, 0.0), 1e-8);
    EXPECT_LT(rel_err(b.z_score, a.z_score, 1e-6), 1e-8);
  }
}

// ---- brute-force equivalence ----------------------------------------------

TEST(BruteForce, SmallPanelsMatchNaiveImplementations) {
  // Relative error is measured against the larger of |reference| and the sum
  // of absolute terms, since T_SUM can cancel to nearly zero.
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> nd(4, 12), pd(2, 4);
  for (int rep = 0; rep < 500; ++rep) {
    const int n = nd(rng);
    const int p = pd(rng);
    const int K = std::uniform_int_distribution<int>(1, std::min(3, n - 2))(rng);
    const Eigen::MatrixXd x = gaussian(n, p, rng);
    const TimeSeriesPanel panel(x);
    const double tm = t_max(panel, K).t_max;
    EXPECT_LT(rel_err(tm, oracle::t_max(x, K), 0.0), 1e-10) << "rep " << rep;
    const auto s = t_sum(panel, K);
    const auto o = oracle::t_sum(x, K);
    EXPECT_LT(rel_err(s.t_sum, o.t_sum, o.abs_scale), 1e-10) << "rep " << rep;
    EXPECT_LT(rel_err(s.trace_sq_hat, o.trace_sq, 0.0), 1e-10) << "rep " << rep;
  }
}

// ---- Fisher combination ----------------------------------------------------

TEST(Fisher, Examples) {
  const auto one = fisher_combine(1.0, 1.0);
  EXPECT_EQ(one.t_fc, 0.0);
  EXPECT_EQ(one.p_value, 1.0);

  const auto r = fisher_combine(0.05, 0.05);
  EXPECT_NEAR(r.t_fc, 11.982929094215964, 1e-12);
  EXPECT_NEAR(r.p_value, 0.017478661367769955, 1e-12);
  EXPECT_NEAR(r.p_value, 1.0 - chi2_4_cdf(r.t_fc), 1e-10);
}

TEST(Fisher, ClampsZeroPValues) {
  const auto r = fisher_combine(0.0, 0.5);
  EXPECT_TRUE(std::isfinite(r.t_fc));
  EXPECT_NEAR(r.t_fc, -2.0 * std::log(1e-300) - 2.0 * std::log(0.5), 1e-9);
}

TEST(Fisher, RejectsInvalidP) {
  for (double bad : {-0.1, 1.5, std::nan("")}) {
    try {
      fisher_combine(bad, 0.5);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidProbability);
    }
  }
}

TEST(Fisher, UniformPairsAreChiSquareFour) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> t(10000);
  for (auto& v : t) v = fisher_combine(u(rng), u(rng)).t_fc;
  EXPECT_LT(oracle::ks_distance(t, [](double x) { return chi2_4_cdf(x); }), 0.02);
}

// ---- run_all / report ------------------------------------------------------

TEST(RunAll, ComposesComponentResults) {
  const NullGenerator gen(Scenario::NullI, Innovation::Gaussian, 100, 30);
  auto rng = make_stream(7);
  const auto panel = gen(rng);
  const auto r = run_all(panel, 1, 0.05);
  const auto m = t_max(panel, 1);
  const auto s = t_sum(panel, 1);
  EXPECT_EQ(r.max.t_max, m.t_max);
  EXPECT_EQ(r.max.p_value, m.p_value);
  EXPECT_EQ(r.sum.t_sum, s.t_sum);
  EXPECT_EQ(r.sum.p_value, s.p_value);
  EXPECT_NEAR(r.t_fc, -2.0 * std::log(m.p_value) - 2.0 * std::log(s.p_value), 1e-10);
  EXPECT_NEAR(r.fc_p_value, 1.0 - chi2_4_cdf(r.t_fc), 1e-10);
  EXPECT_EQ(r.decisions.max, m.p_value < 0.05);
  EXPECT_EQ(r.decisions.sum, s.p_value < 0.05);
  EXPECT_EQ(r.decisions.fc, r.fc_p_value < 0.05);
}

TEST(RunAll, ExtremeLevelRejectsEverything) {
  const NullGenerator gen(Scenario::NullI, Innovation::Gaussian, 100, 30);
  auto rng = make_stream(7);
  const auto r = run_all(gen(rng), 1, 1.0 - 1e-9);
  EXPECT_TRUE(r.decisions.max);
  EXPECT_TRUE(r.decisions.sum);
  EXPECT_TRUE(r.decisions.fc);
}

TEST(RunAll, InvalidAlpha) {
  std::mt19937_64 rng(1);
  const TimeSeriesPanel panel(gaussian(20, 3, rng));
  EXPECT_THROW(run_all(panel, 1, 0.0), Error);
  EXPECT_THROW(run_all(panel, 1, 1.0), Error);
}

TEST(RunAll, PlantedLagOneCorrelationIsDetectedByMax) {
  // e_t1 = z_t1 + 0.6 z_{t-1,1}, other components i.i.d. N(0, 1).
  const int n = 200, p = 30, reps = 200;
  int rejections = 0;
  for (int rep = 0; rep < reps; ++rep) {
    auto rng = make_stream(4242, 1, rep);
    Eigen::MatrixXd z = draw_innovations(Innovation::Gaussian, n + 1, p, rng);
    Eigen::MatrixXd x = z.bottomRows(n);
    x.col(0) += 0.6 * z.col(0).head(n);
    rejections += run_all(TimeSeriesPanel(x), 1, 0.05).decisions.max;
  }
  EXPECT_GE(rejections, 190);  // >= 95%
}

TEST(RunAll, ConcurrentCallsAgree) {
  std::mt19937_64 rng(3);
  const TimeSeriesPanel panel(gaussian(80, 20, rng));
  const auto ref = run_all(panel, 2, 0.05);
  std::vector<TestReport> out(4);
  std::vector<std::thread> threads;
  for (int i = 0; i < 4; ++i) threads.emplace_back([&, i] { out[i] = run_all(panel, 2, 0.05); });
  for (auto& t : threads) t.join();
  for (const auto& r : out) {
    EXPECT_EQ(r.t_fc, ref.t_fc);
    EXPECT_EQ(r.sum.z_score, ref.sum.z_score);
  }
}

TEST(Report, CsvRecordHasDocumentedColumns) {
  std::mt19937_64 rng(5);
  const auto r = run_all(TimeSeriesPanel(gaussian(30, 4, rng)), 1, 0.05);
  EXPECT_STREQ(kReportCsvHeader, "n,p,K,alpha,t_max,gumbel_y,p_max,t_sum,z,p_sum,t_fc,p_fc,rej_max,rej_sum,rej_fc");
  const auto rec = to_csv_record(r);
  EXPECT_EQ(std::count(rec.begin(), rec.end(), ','), 14);
  EXPECT_EQ(rec.rfind("30,4,1,0.05", 0), 0u);
  const auto j = to_json(r);
  EXPECT_EQ(j.at("p_fc").get<double>(), r.fc_p_value);
  EXPECT_EQ(j.at("rej_sum").get<bool>(), r.decisions.sum);
}
