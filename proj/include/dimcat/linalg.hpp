#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "dimcat/config.hpp"

namespace dimcat {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

/// Kronecker product, (a⊗b)[(i*rb+k),(j*cb+l)] = a[i,j]*b[k,l].
inline CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline CMat ident(Eigen::Index n) { return CMat::Identity(n, n); }

/// Operator norm (largest singular value).
inline double op_norm(const CMat& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<CMat>(m).singularValues()(0);
}

inline double herm_residual(const CMat& m) { return (m - m.adjoint()).norm(); }

inline RVec herm_eigenvalues(const CMat& m) {
  Eigen::SelfAdjointEigenSolver<CMat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double min_eigenvalue(const CMat& herm) {
  return herm_eigenvalues(herm).minCoeff();
}

namespace detail {

inline void require_hermitian(const CMat& m, const char* who) {
  if (m.rows() != m.cols()) throw Error(std::string(who) + ": matrix not square");
  if (herm_residual(m) > tol().equality * (1.0 + m.norm()))
    throw Error(std::string(who) + ": matrix not Hermitian");
}

// f applied through the spectral decomposition of a Hermitian matrix.
template <typename F>
CMat herm_function(const CMat& m, F&& f, const char* who) {
  require_hermitian(m, who);
  Eigen::SelfAdjointEigenSolver<CMat> es(m);
  RVec vals = es.eigenvalues();
  CVec fvals(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i) fvals(i) = f(vals(i));
  return es.eigenvectors() * fvals.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Positive square root of a positive semidefinite matrix.
inline CMat herm_sqrt(const CMat& m) {
  return detail::herm_function(
      m, [](double x) { return std::sqrt(std::max(x, 0.0)); }, "herm_sqrt");
}

inline CMat herm_inv_sqrt(const CMat& m) {
  detail::require_hermitian(m, "herm_inv_sqrt");
  double lo = min_eigenvalue(m);
  if (lo <= 0.0) throw Error("herm_inv_sqrt: matrix not positive definite");
  return detail::herm_function(
      m, [](double x) { return 1.0 / std::sqrt(x); }, "herm_inv_sqrt");
}

/// Pseudo-inverse square root: eigenvalues below the cutoff are dropped.
inline CMat herm_pinv_sqrt(const CMat& m, double cutoff) {
  return detail::herm_function(
      m, [cutoff](double x) { return x > cutoff ? 1.0 / std::sqrt(x) : 0.0; },
      "herm_pinv_sqrt");
}

inline bool is_positive_definite(const CMat& m, double margin = 0.0) {
  if (herm_residual(m) > tol().equality * (1.0 + m.norm())) return false;
  return min_eigenvalue(m) > margin;
}

/// Geometric mean of two positive definite matrices:
/// G = a^{1/2} (a^{-1/2} b a^{-1/2})^{1/2} a^{1/2}, the unique positive
/// definite G with G a^{-1} G = b.
inline CMat geometric_mean(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error("geometric_mean: size mismatch");
  if (!is_positive_definite(a) || !is_positive_definite(b))
    throw Error("geometric_mean: inputs must be Hermitian positive definite");
  CMat ah = herm_sqrt(a);
  CMat aih = herm_inv_sqrt(a);
  CMat mid = herm_sqrt(CMat(aih * b * aih));
  return ah * mid * ah;
}

struct PfResult {
  double value = 0.0;
  RVec vector;
  int iterations = 0;
};

/// Perron-Frobenius eigenvalue and nonnegative eigenvector of an entrywise
/// nonnegative matrix. Power iteration on m + I (the shift removes periodic
/// oscillation without moving the eigenvector), seeded from the all-ones
/// vector, Rayleigh-quotient stopping.
inline PfResult pf_eigen(const RMat& m, int max_iter = 20000) {
  if (m.rows() != m.cols()) throw Error("pf_eigen: matrix not square");
  const Eigen::Index n = m.rows();
  if (m.size() > 0 && m.minCoeff() < 0.0)
    throw Error("pf_eigen: matrix has negative entries");
  if (n == 0) return {0.0, RVec(), 0};
  RMat shifted = m + RMat::Identity(n, n);
  RVec x = RVec::Ones(n) / std::sqrt(double(n));
  double lambda = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    RVec y = shifted * x;
    lambda = x.dot(y);
    double res = (y - lambda * x).norm();
    double ynorm = y.norm();
    if (ynorm == 0.0) return {0.0, x, it};  // nilpotent corner case
    x = y / ynorm;
    if (res <= 1e-13 * std::max(1.0, std::abs(lambda)))
      return {lambda - 1.0, x.cwiseMax(0.0).normalized(), it};
  }
  throw Error("pf_eigen: power iteration did not converge within " +
              std::to_string(max_iter) + " iterations");
}

/// Antilinear map on C^n in the fixed convention v ↦ mat * conj(v).
/// Its adjoint is w ↦ mat^T * conj(w).
struct AntilinearMap {
  CMat mat;

  Eigen::Index dim() const { return mat.rows(); }
  CVec operator()(const CVec& v) const { return mat * v.conjugate(); }

  /// Matrix of the inverse antilinear map.
  CMat inverse_mat() const {
    Eigen::FullPivLU<CMat> lu(mat);
    if (!lu.isInvertible()) throw Error("AntilinearMap: singular matrix");
    return lu.inverse().conjugate();
  }
};

/// Matrices of J*J and J^{-1*}J^{-1} (both linear, Hermitian positive
/// definite). Tr(J*J) and Tr(J^{-1*}J^{-1}) are the two conjugate-equation
/// norms attached to an antilinear intertwiner.
inline std::pair<CMat, CMat> antilinear_products(const AntilinearMap& j) {
  const CMat& a = j.mat;
  CMat k = j.inverse_mat();
  CMat jj = a.transpose() * a.conjugate();
  CMat inv_jj = k.transpose() * k.conjugate();
  return {jj, inv_jj};
}

/// Permutation matrix swapping tensor factors: (v⊗w) ↦ (w⊗v),
/// C^dl ⊗ C^dr → C^dr ⊗ C^dl.
inline CMat flip_matrix(Eigen::Index dl, Eigen::Index dr) {
  CMat out = CMat::Zero(dl * dr, dl * dr);
  for (Eigen::Index i = 0; i < dl; ++i)
    for (Eigen::Index k = 0; k < dr; ++k) out(k * dl + i, i * dr + k) = 1.0;
  return out;
}

// ---- seeded random helpers (tests and the decomposition algorithm) ----

using Rng = std::mt19937_64;

inline CMat random_gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m / std::sqrt(2.0 * double(std::max<Eigen::Index>(rows, 1)));
}

inline CMat random_unitary(Rng& rng, Eigen::Index n) {
  CMat a = random_gaussian(rng, n, n);
  Eigen::HouseholderQR<CMat> qr(a);
  CMat q = qr.householderQ();
  CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    Complex d = r(i, i);
    q.col(i) *= (std::abs(d) > 0 ? d / std::abs(d) : 1.0);
  }
  return q;
}

/// Invertible matrix with singular values kept inside [lo, hi].
inline CMat random_invertible(Rng& rng, Eigen::Index n, double lo = 0.4,
                              double hi = 2.5) {
  CMat u = random_unitary(rng, n);
  CMat v = random_unitary(rng, n);
  std::uniform_real_distribution<double> d(lo, hi);
  CVec s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = d(rng);
  return u * s.asDiagonal() * v.adjoint();
}

inline CMat random_hermitian(Rng& rng, Eigen::Index n) {
  CMat a = random_gaussian(rng, n, n);
  return (a + a.adjoint()) / 2.0;
}

}  // namespace dimcat
