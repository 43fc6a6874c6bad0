#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "hdwn/linalg.hpp"
#include "hdwn/series.hpp"
#include "oracles.hpp"

using namespace hdwn;

namespace {

Eigen::MatrixXd rows(std::initializer_list<std::initializer_list<double>> r) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Eigen::MatrixXd random_matrix(Eigen::Index n, Eigen::Index p, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Eigen::MatrixXd m(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) m(i, j) = d(rng);
  return m;
}

}  // namespace

TEST(Panel, RejectsBadShapesAndNonFinite) {
  EXPECT_THROW(TimeSeriesPanel(Eigen::MatrixXd(1, 3)), Error);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(4, 2);
  bad(2, 1) = std::nan("");
  try {
    TimeSeriesPanel p(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidData);
    EXPECT_NE(std::string(e.what()).find("row 3, column 2"), std::string::npos);
  }
}

TEST(Panel, OptionalCentering) {
  const TimeSeriesPanel raw(rows({{1, 2}, {3, 6}}));
  EXPECT_DOUBLE_EQ(raw.data()(0, 0), 1.0);
  const TimeSeriesPanel centred(rows({{1, 2}, {3, 6}}), Centering::SubtractMean);
  EXPECT_DOUBLE_EQ(centred.data()(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(centred.data()(1, 1), 2.0);
}

TEST(Autocovariance, HandEvaluatedExamples) {
  const TimeSeriesPanel a(rows({{1}, {2}, {3}}));
  EXPECT_NEAR(sample_autocovariance(a, 1).values(0, 0), 8.0 / 3.0, 1e-15);

  const TimeSeriesPanel b(rows({{1, 0}, {0, 1}}));
  const auto s0 = sample_autocovariance(b, 0).values;
  EXPECT_TRUE(s0.isApprox(0.5 * Eigen::MatrixXd::Identity(2, 2)));

  const TimeSeriesPanel zero(Eigen::MatrixXd::Zero(5, 3));
  for (int k = 0; k < 5; ++k) EXPECT_EQ(sample_autocovariance(zero, k).values.norm(), 0.0);
}

TEST(Autocovariance, LagOutOfRange) {
  const TimeSeriesPanel a(rows({{1}, {2}, {3}}));
  try {
    sample_autocovariance(a, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LagTooLarge);
  }
  EXPECT_NO_THROW(sample_autocovariance(a, 2));
}

TEST(Autocovariance, MatchesTripleLoopAndIsAsymmetric) {
  std::mt19937_64 rng(7);
  const Eigen::MatrixXd x = random_matrix(15, 4, rng);
  const TimeSeriesPanel panel(x);
  for (int k = 0; k < 5; ++k)
    EXPECT_LT((sample_autocovariance(panel, k).values - oracle::autocovariance(x, k)).cwiseAbs().maxCoeff(), 1e-13);
  const auto s1 = sample_autocovariance(panel, 1).values;
  EXPECT_GT((s1 - s1.transpose()).norm(), 1e-3);
}

TEST(Autocovariance, LagZeroIsSymmetricPsd) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const TimeSeriesPanel panel(random_matrix(8, 12, rng));  // p > n: singular but PSD
    const auto s0 = sample_autocovariance(panel, 0).values;
    EXPECT_LT((s0 - s0.transpose()).cwiseAbs().maxCoeff(), 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s0);
    EXPECT_GT(eig.eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(Autocorrelation, UnitDiagonalAtLagZero) {
  std::mt19937_64 rng(3);
  const TimeSeriesPanel panel(random_matrix(20, 6, rng));
  const auto r0 = sample_autocorrelation(panel, 0).values;
  for (Eigen::Index i = 0; i < 6; ++i) EXPECT_NEAR(r0(i, i), 1.0, 1e-12);
}

TEST(Autocorrelation, PerfectlyCorrelatedColumns) {
  Eigen::MatrixXd x(6, 2);
  x.col(0) << 1, -2, 0.5, 3, -1, 2;
  x.col(1) = 2.0 * x.col(0);
  const auto r0 = sample_autocorrelation(TimeSeriesPanel(x), 0).values;
  EXPECT_NEAR(r0(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(r0(1, 0), 1.0, 1e-12);
}

TEST(Autocorrelation, HandEvaluatedLagOne) {
  const TimeSeriesPanel a(rows({{1}, {2}, {3}}));
  EXPECT_NEAR(sample_autocorrelation(a, 1).values(0, 0), 4.0 / 7.0, 1e-15);
}

TEST(Autocorrelation, DegenerateColumnNamed) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(5, 3);
  x.col(1).setZero();
  try {
    sample_autocorrelation(TimeSeriesPanel(x), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateVariance);
    EXPECT_NE(std::string(e.what()).find("column 2"), std::string::npos);
  }
}

TEST(Autocorrelation, InvariantUnderPositiveColumnRescaling) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::MatrixXd x = random_matrix(30, 5, rng);
    Eigen::VectorXd c(5);
    for (int j = 0; j < 5; ++j) c(j) = scale(rng);
    const TimeSeriesPanel a(x), b(x * c.asDiagonal());
    for (int k = 0; k < 4; ++k)
      EXPECT_LT((sample_autocorrelation(a, k).values - sample_autocorrelation(b, k).values).cwiseAbs().maxCoeff(),
                1e-10);
  }
}

TEST(SymSqrt, SimpleCases) {
  EXPECT_TRUE(sym_sqrt(Eigen::MatrixXd::Identity(4, 4)).isApprox(Eigen::MatrixXd::Identity(4, 4), 1e-14));
  Eigen::MatrixXd d = Eigen::Vector2d(4, 9).asDiagonal();
  EXPECT_TRUE(sym_sqrt(d).isApprox(Eigen::MatrixXd(Eigen::Vector2d(2, 3).asDiagonal()), 1e-14));

  Eigen::MatrixXd s(2, 2);
  s << 2, 1, 1, 2;
  const auto m = sym_sqrt(s);
  EXPECT_LE((oracle::naive_matmul(m, m) - s).norm(), 1e-10);
  EXPECT_LT((m - m.transpose()).norm(), 1e-15);
}

TEST(SymSqrt, Errors) {
  Eigen::MatrixXd neg(2, 2);
  neg << 1, 0, 0, -1e-3;
  try {
    sym_sqrt(neg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPsd);
  }
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 0.5, 0.4, 1;
  try {
    sym_sqrt(asym);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
  }
  // Round-off negatives inside the clamp window are accepted.
  Eigen::MatrixXd tiny(2, 2);
  tiny << 1, 0, 0, -5e-11;
  EXPECT_NO_THROW(sym_sqrt(tiny));
}

TEST(SymSqrt, ReproducesRandomPsdUpTo200) {
  std::mt19937_64 rng(5);
  for (Eigen::Index p : {2, 5, 17, 60, 120, 200}) {
    const Eigen::MatrixXd g = random_matrix(p, p / 2 + 1, rng);  // rank-deficient PSD
    const Eigen::MatrixXd s = g * g.transpose();
    const Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
    const auto m = sym_sqrt(sym);
    EXPECT_LE((m * m - sym).norm(), 1e-8 * sym.norm()) << "p = " << p;
  }
}

TEST(PsdPartSqrt, AgreesWithSymSqrtOnPsdInput) {
  std::mt19937_64 rng(29);
  const Eigen::MatrixXd g = random_matrix(12, 12, rng);
  const Eigen::MatrixXd s = g * g.transpose();
  const Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
  EXPECT_LT((psd_part_sqrt(sym) - sym_sqrt(sym)).norm(), 1e-10 * sym_sqrt(sym).norm());
}

TEST(PsdPartSqrt, SquaresToNearestPsdMatrix) {
  // S = P - N with P, N PSD and PN = 0 characterises P as the Frobenius
  // projection of S onto the PSD cone.
  std::mt19937_64 rng(37);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::MatrixXd g = random_matrix(9, 9, rng);
    const Eigen::MatrixXd s = 0.5 * (g + g.transpose());
    ASSERT_LT(min_eigenvalue(s), -1e-3);
    const Eigen::MatrixXd r = psd_part_sqrt(s);
    const Eigen::MatrixXd p = oracle::naive_matmul(r, r);
    const Eigen::MatrixXd neg = p - s;
    EXPECT_GT(min_eigenvalue(0.5 * (p + p.transpose())), -1e-10);
    EXPECT_GT(min_eigenvalue(0.5 * (neg + neg.transpose())), -1e-10);
    EXPECT_LT(oracle::naive_matmul(p, neg).norm(), 1e-10 * s.squaredNorm());
  }
  EXPECT_THROW(sym_sqrt(0.5 * (random_matrix(4, 4, rng) + random_matrix(4, 4, rng).transpose())), Error);
}

TEST(TraceProduct, Examples) {
  const Eigen::MatrixXd i2 = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_DOUBLE_EQ(trace_product(i2, i2), 2.0);
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 0, 1, 1, 0;
  EXPECT_DOUBLE_EQ(trace_product(a, b), 5.0);
  EXPECT_DOUBLE_EQ(trace_product(a, Eigen::MatrixXd::Zero(2, 2)), 0.0);
  EXPECT_THROW(trace_product(a, Eigen::MatrixXd::Zero(3, 2)), Error);
}

TEST(TraceProduct, MatchesExplicitProduct) {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::MatrixXd a = random_matrix(7, 4, rng);
    const Eigen::MatrixXd b = random_matrix(4, 7, rng);
    const double expected = oracle::naive_matmul(a, b).trace();
    EXPECT_LE(std::abs(trace_product(a, b) - expected), 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST(PanelCsv, ParsesWithAndWithoutHeader) {
  std::istringstream with("a,b\n1,2\n3.5,-4e-1\n");
  const auto p1 = read_panel_csv(with, true);
  EXPECT_EQ(p1.n(), 2);
  EXPECT_EQ(p1.p(), 2);
  EXPECT_DOUBLE_EQ(p1.data()(1, 1), -0.4);

  std::istringstream without("1,2\n3,4\n5,6\n");
  EXPECT_EQ(read_panel_csv(without, false).n(), 3);
}

TEST(PanelCsv, ReportsLocationOfBadCell) {
  std::istringstream in("1,2\n3,x\n");
  try {
    read_panel_csv(in, false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidData);
    EXPECT_NE(std::string(e.what()).find("row 2, column 2"), std::string::npos);
  }
}

TEST(PanelCsv, WriteReadRoundTripIsExact) {
  std::mt19937_64 rng(31);
  const TimeSeriesPanel panel(random_matrix(9, 3, rng));
  std::stringstream buf;
  write_panel_csv(buf, panel);
  const auto back = read_panel_csv(buf, false);
  EXPECT_EQ(back.data(), panel.data());
}
