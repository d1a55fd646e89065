#pragma once

#include <Eigen/Dense>

#include <functional>

#include "opscale/error.hpp"

namespace opscale {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class Normalization { raw, trace_p, det_1 };

std::string_view to_string(Normalization tag);

/// Real symmetric matrix. Construction symmetrizes the input as (M + M^T)/2;
/// inputs that are far from symmetric are rejected.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Matrix m);

  static SymMatrix identity(Index p);
  static SymMatrix zero(Index p);
  static SymMatrix diagonal(const Vector& d);

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

  double trace() const { return m_.trace(); }
  double frobenius() const { return m_.norm(); }
  bool is_traceless(double rel_tol = 1e-12) const;

  /// Inner product tr(A B) for symmetric A, B.
  double dot(const SymMatrix& other) const;

 private:
  Matrix m_;
};

/// Symmetric positive definite matrix with a normalization tag.
///
/// The constructor rejects inputs whose smallest eigenvalue is at most
/// 1e-12 times the largest (NotPositiveDefinite) and checks the tag:
/// trace_p requires |tr - p| <= 1e-9 p, det_1 requires |log det| <= 1e-9.
class PDMatrix {
 public:
  explicit PDMatrix(Matrix m, Normalization tag = Normalization::raw);

  static PDMatrix identity(Index p);

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }
  Normalization normalization() const { return tag_; }

  SymMatrix as_sym() const { return SymMatrix(m_); }

 private:
  Matrix m_;
  Normalization tag_;
};

// Dense symmetric helpers. All take a symmetric input and return a
// symmetrized result.
Matrix symmetrize(const Matrix& m);
Vector sym_eigenvalues(const Matrix& m);
double sym_op_norm(const Matrix& m);
Matrix sym_apply(const Matrix& m, const std::function<double(double)>& f);
double log_det_pd(const Matrix& m);
double condition_number(const Matrix& m);

/// Largest singular value of an arbitrary dense matrix.
double op_norm(const Matrix& m);

Matrix sym_exp(const Matrix& m);
Matrix sym_log(const Matrix& m);  // requires PD input
Matrix pd_inverse(const Matrix& m);
Matrix pd_inverse_sqrt(const Matrix& m);

PDMatrix mat_sqrt(const PDMatrix& a);

/// d(A, B) = ||I - A^{1/2} B^{-1} A^{1/2}||_op, evaluated through the
/// spectrum of B^{-1} A.
double error_op(const PDMatrix& a, const PDMatrix& b);

/// Frobenius counterpart of error_op.
double error_frob(const PDMatrix& a, const PDMatrix& b);

PDMatrix normalize(const PDMatrix& a, Normalization target);

/// Point sqrt(Z) exp(tX) sqrt(Z) on the geodesic through Z in direction X.
PDMatrix geodesic_point(const PDMatrix& z, const SymMatrix& x, double t);

}  // namespace opscale
