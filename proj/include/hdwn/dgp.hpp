#ifndef HDWN_DGP_HPP
#define HDWN_DGP_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "hdwn/error.hpp"
#include "hdwn/linalg.hpp"
#include "hdwn/rng.hpp"
#include "hdwn/series.hpp"

namespace hdwn {

/// Null settings I-III (e_t = A z_t) and the VAR(1) / VMA(1) / VARMA(1)
/// alternatives.
enum class Scenario { NullI, NullII, NullIII, VAR1, VMA1, VARMA1 };

/// Gaussian: N(0, 1). ShiftedGamma: Gamma(shape 4, scale 0.5) - 2, which has
/// mean 0, variance 1 and fourth moment 4.5.
enum class Innovation { Gaussian, ShiftedGamma };

inline bool is_alternative(Scenario s) { return s == Scenario::VAR1 || s == Scenario::VMA1 || s == Scenario::VARMA1; }

inline std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::NullI: return "NullI";
    case Scenario::NullII: return "NullII";
    case Scenario::NullIII: return "NullIII";
    case Scenario::VAR1: return "VAR1";
    case Scenario::VMA1: return "VMA1";
    case Scenario::VARMA1: return "VARMA1";
  }
  return "?";
}

inline std::string_view to_string(Innovation i) { return i == Innovation::Gaussian ? "Gaussian" : "ShiftedGamma"; }

inline std::optional<Scenario> parse_scenario(std::string_view s) {
  for (auto v : {Scenario::NullI, Scenario::NullII, Scenario::NullIII, Scenario::VAR1, Scenario::VMA1, Scenario::VARMA1})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

inline std::optional<Innovation> parse_innovation(std::string_view s) {
  if (s == "Gaussian") return Innovation::Gaussian;
  if (s == "ShiftedGamma") return Innovation::ShiftedGamma;
  return std::nullopt;
}

struct DgpSpec {
  Scenario scenario = Scenario::NullI;
  Innovation innovation = Innovation::Gaussian;
  Eigen::Index n = 100;
  Eigen::Index p = 30;
  std::optional<int> m;  // block size, alternatives only
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 10) fail(ErrorCode::InvalidInput, "DgpSpec: n = " + std::to_string(n) + " < 10");
    if (p < 2) fail(ErrorCode::InvalidInput, "DgpSpec: p = " + std::to_string(p) + " < 2");
    if (is_alternative(scenario)) {
      if (!m) fail(ErrorCode::InvalidInput, "DgpSpec: alternative scenario needs m");
      if (*m < 1 || *m > 10 || *m > p)
        fail(ErrorCode::InvalidInput, "DgpSpec: m = " + std::to_string(*m) + " outside [1, min(10, p)]");
    } else if (m) {
      fail(ErrorCode::InvalidInput, "DgpSpec: m given for null scenario");
    }
  }
};

inline constexpr int kBurnIn = 300;
inline constexpr double kMaxSpectralRadius = 0.999;

// ---- null settings ---------------------------------------------------------

/// Covariance of settings I (0.5 |i-j|^{-2} off the diagonal) and
/// II (0.5 for 0 < |i-j| < 5); unit diagonal in both.
inline Eigen::MatrixXd make_sigma(Scenario setting, Eigen::Index p) {
  if (setting != Scenario::NullI && setting != Scenario::NullII)
    fail(ErrorCode::InvalidInput, "make_sigma: only NullI and NullII have a fixed covariance");
  if (p < 2) fail(ErrorCode::InvalidInput, "make_sigma: p < 2");
  Eigen::MatrixXd s(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const double d = static_cast<double>(std::abs(i - j));
      if (i == j) s(i, j) = 1.0;
      else if (setting == Scenario::NullI) s(i, j) = 0.5 / (d * d);
      else s(i, j) = d < 5.0 ? 0.5 : 0.0;
    }
  }
  return s;
}

/// rows x p matrix of i.i.d. innovations, drawn in time order.
inline Eigen::MatrixXd draw_innovations(Innovation law, Eigen::Index rows, Eigen::Index p, Rng& rng) {
  if (rows < 1 || p < 1) fail(ErrorCode::InvalidInput, "draw_innovations: empty shape");
  Eigen::MatrixXd z(rows, p);
  if (law == Innovation::Gaussian) {
    std::normal_distribution<double> dist(0.0, 1.0);
    for (Eigen::Index t = 0; t < rows; ++t)
      for (Eigen::Index i = 0; i < p; ++i) z(t, i) = dist(rng);
  } else {
    std::gamma_distribution<double> dist(4.0, 0.5);
    for (Eigen::Index t = 0; t < rows; ++t)
      for (Eigen::Index i = 0; i < p; ++i) z(t, i) = dist(rng) - 2.0;
  }
  return z;
}

/// Draws panels e_t = A z_t for one null setting. Setting III draws a fresh A
/// with U(-1, 1) entries for every panel. Settings I-II use A = Sigma_+^{1/2},
/// computed once, where Sigma_+ is Sigma with negative eigenvalues set to zero:
/// setting I is positive definite for every p so Sigma_+ = Sigma, but the
/// banded setting II matrix is indefinite from p = 10 on.
class NullGenerator {
 public:
  NullGenerator(Scenario setting, Innovation law, Eigen::Index n, Eigen::Index p)
      : setting_(setting), law_(law), n_(n), p_(p) {
    if (is_alternative(setting)) fail(ErrorCode::InvalidInput, "NullGenerator: alternative scenario");
    if (setting != Scenario::NullIII) mixing_ = psd_part_sqrt(make_sigma(setting, p));
  }

  TimeSeriesPanel operator()(Rng& rng) const {
    if (setting_ == Scenario::NullIII) {
      std::uniform_real_distribution<double> unif(-1.0, 1.0);
      Eigen::MatrixXd a(p_, p_);
      for (Eigen::Index i = 0; i < p_; ++i)
        for (Eigen::Index j = 0; j < p_; ++j) a(i, j) = unif(rng);
      return TimeSeriesPanel(draw_innovations(law_, n_, p_, rng) * a.transpose());
    }
    return TimeSeriesPanel(draw_innovations(law_, n_, p_, rng) * mixing_.transpose());
  }

  const Eigen::MatrixXd& mixing() const noexcept { return mixing_; }

 private:
  Scenario setting_;
  Innovation law_;
  Eigen::Index n_;
  Eigen::Index p_;
  Eigen::MatrixXd mixing_;
};

inline TimeSeriesPanel gen_null_panel(const DgpSpec& spec) {
  spec.validate();
  if (is_alternative(spec.scenario)) fail(ErrorCode::InvalidInput, "gen_null_panel: scenario is an alternative");
  auto rng = make_stream(spec.seed);
  return NullGenerator(spec.scenario, spec.innovation, spec.n, spec.p)(rng);
}

// ---- alternatives ----------------------------------------------------------

/// p x p coefficient matrix whose only nonzero block is the top-left m x m.
struct CoeffMatrix {
  Eigen::MatrixXd values;
  int m = 1;
};

/// Support of the uniform law for the coefficient block.
struct CoeffRange {
  double lo;
  double hi;
};

inline CoeffRange coeff_range(Scenario scenario, int m) {
  const double md = static_cast<double>(m);
  switch (scenario) {
    case Scenario::VAR1: return m == 1 ? CoeffRange{0.4, 0.8} : CoeffRange{-1.4 / md, 1.4 / md};
    case Scenario::VMA1: return m == 1 ? CoeffRange{0.4, 0.9} : CoeffRange{-1.8 / md, 1.8 / md};
    case Scenario::VARMA1: return m == 1 ? CoeffRange{0.4, 0.8} : CoeffRange{-1.6 / md, 1.6 / md};
    default: fail(ErrorCode::InvalidInput, "coeff_range: not an alternative scenario");
  }
}

inline CoeffMatrix make_coeff_matrix(Scenario scenario, int m, Eigen::Index p, Rng& rng) {
  if (!is_alternative(scenario)) fail(ErrorCode::InvalidInput, "make_coeff_matrix: not an alternative scenario");
  if (m < 1 || m > 10 || m > p)
    fail(ErrorCode::InvalidInput, "make_coeff_matrix: m = " + std::to_string(m) + " outside [1, min(10, p)]");
  const auto range = coeff_range(scenario, m);
  std::uniform_real_distribution<double> unif(range.lo, range.hi);
  CoeffMatrix a{Eigen::MatrixXd::Zero(p, p), m};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a.values(i, j) = unif(rng);
  return a;
}

inline double spectral_radius(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> eig(a, false);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

/// Spectral radius of the autoregressive part of the recursion (0 for VMA).
inline double recursion_radius(Scenario scenario, const CoeffMatrix& a) {
  const Eigen::MatrixXd block = a.values.topLeftCorner(a.m, a.m);
  switch (scenario) {
    case Scenario::VAR1: return spectral_radius(block);
    case Scenario::VARMA1: return spectral_radius(0.5 * block);
    default: return 0.0;
  }
}

/// Simulates n rows of the alternative recursion for a given coefficient
/// matrix. VAR/VARMA start from zero state and discard kBurnIn steps.
inline TimeSeriesPanel simulate_alternative(Scenario scenario, const CoeffMatrix& a, Innovation law, Eigen::Index n,
                                            Rng& rng) {
  const auto p = a.values.rows();
  if (recursion_radius(scenario, a) >= kMaxSpectralRadius)
    fail(ErrorCode::NonStationary, "recursion spectral radius >= 0.999");
  const auto m = static_cast<Eigen::Index>(a.m);
  const Eigen::MatrixXd block = a.values.topLeftCorner(m, m);

  if (scenario == Scenario::VMA1) {
    const Eigen::MatrixXd z = draw_innovations(law, n + 1, p, rng);
    Eigen::MatrixXd e = z.bottomRows(n);
    e.leftCols(m) += z.topRows(n).leftCols(m) * block.transpose();
    return TimeSeriesPanel(std::move(e));
  }

  const bool varma = scenario == Scenario::VARMA1;
  const double ar = varma ? 0.5 : 1.0;
  const Eigen::Index steps = kBurnIn + n;
  const Eigen::MatrixXd z = draw_innovations(law, steps + (varma ? 1 : 0), p, rng);
  const Eigen::Index off = varma ? 1 : 0;
  Eigen::MatrixXd e(n, p);
  Eigen::VectorXd state = Eigen::VectorXd::Zero(m);
  for (Eigen::Index s = 0; s < steps; ++s) {
    Eigen::VectorXd next = ar * (block * state) + z.row(s + off).head(m).transpose();
    if (varma) next += 0.5 * (block * z.row(s).head(m).transpose());
    state = std::move(next);
    if (s >= kBurnIn) {
      const auto t = s - kBurnIn;
      e.row(t) = z.row(s + off);
      e.row(t).head(m) = state.transpose();
    }
  }
  return TimeSeriesPanel(std::move(e));
}

/// Redraws the coefficient matrix until the recursion is stationary.
inline CoeffMatrix draw_stationary_coeff(Scenario scenario, int m, Eigen::Index p, Rng& rng, int max_attempts = 1000) {
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    auto a = make_coeff_matrix(scenario, m, p, rng);
    if (recursion_radius(scenario, a) < kMaxSpectralRadius) return a;
  }
  fail(ErrorCode::NonStationary, "no stationary coefficient draw in " + std::to_string(max_attempts) + " attempts");
}

/// One panel from an alternative spec: A is drawn from the spec's stream, then
/// the recursion is simulated from the same stream.
inline TimeSeriesPanel gen_alternative_panel(const DgpSpec& spec) {
  spec.validate();
  if (!is_alternative(spec.scenario)) fail(ErrorCode::InvalidInput, "gen_alternative_panel: null scenario");
  auto rng = make_stream(spec.seed);
  const auto a = make_coeff_matrix(spec.scenario, *spec.m, spec.p, rng);
  return simulate_alternative(spec.scenario, a, spec.innovation, spec.n, rng);
}

inline TimeSeriesPanel gen_panel(const DgpSpec& spec) {
  return is_alternative(spec.scenario) ? gen_alternative_panel(spec) : gen_null_panel(spec);
}

}  // namespace hdwn

#endif  // HDWN_DGP_HPP
