#ifndef HDWN_LINALG_HPP
#define HDWN_LINALG_HPP

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "hdwn/error.hpp"

namespace hdwn {

namespace detail {

inline Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> symmetric_eigen(const Eigen::MatrixXd& s, const char* who) {
  if (s.rows() != s.cols()) fail(ErrorCode::ShapeMismatch, std::string(who) + " needs a square matrix");
  if (!s.allFinite()) fail(ErrorCode::InvalidInput, std::string(who) + " input has non-finite entries");
  const double asym = s.size() ? (s - s.transpose()).cwiseAbs().maxCoeff() : 0.0;
  if (asym > 1e-10)
    fail(ErrorCode::InvalidInput, std::string(who) + " input not symmetric (max |S - S^T| = " + std::to_string(asym) + ")");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  if (eig.info() != Eigen::Success) fail(ErrorCode::InvalidInput, "eigendecomposition did not converge");
  return eig;
}

inline Eigen::MatrixXd rebuild(const Eigen::MatrixXd& v, const Eigen::VectorXd& d) {
  Eigen::MatrixXd m = v * d.asDiagonal() * v.transpose();
  return 0.5 * (m + m.transpose());
}

}  // namespace detail

/// Symmetric square root of a PSD matrix via eigendecomposition.
/// Eigenvalues in [-1e-10, 0] are treated as round-off and clamped to zero.
inline Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& s) {
  const auto eig = detail::symmetric_eigen(s, "sym_sqrt");
  Eigen::VectorXd root = eig.eigenvalues();
  for (Eigen::Index i = 0; i < root.size(); ++i) {
    if (root(i) < -1e-10) fail(ErrorCode::NotPsd, "eigenvalue " + std::to_string(root(i)) + " < -1e-10");
    root(i) = root(i) > 0.0 ? std::sqrt(root(i)) : 0.0;
  }
  return detail::rebuild(eig.eigenvectors(), root);
}

/// Square root of the PSD part of a symmetric matrix: negative eigenvalues are
/// set to zero first, so the result squares to the nearest PSD matrix in
/// Frobenius norm. Equals sym_sqrt(s) whenever s is PSD.
inline Eigen::MatrixXd psd_part_sqrt(const Eigen::MatrixXd& s) {
  const auto eig = detail::symmetric_eigen(s, "psd_part_sqrt");
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return detail::rebuild(eig.eigenvectors(), root);
}

/// Smallest eigenvalue of a symmetric matrix.
inline double min_eigenvalue(const Eigen::MatrixXd& s) {
  return detail::symmetric_eigen(s, "min_eigenvalue").eigenvalues().minCoeff();
}

/// tr(AB) without forming the product.
template <class DerivedA, class DerivedB>
double trace_product(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols())
    fail(ErrorCode::ShapeMismatch, "trace_product: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                       " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  return a.cwiseProduct(b.transpose()).sum();
}

}  // namespace hdwn

#endif  // HDWN_LINALG_HPP
