#include "opscale/linalg.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace opscale {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::DimMismatch: return "DimMismatch";
    case Errc::SingularScaling: return "SingularScaling";
    case Errc::SingularImage: return "SingularImage";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::RankTooLarge: return "RankTooLarge";
    case Errc::NotOrthogonal: return "NotOrthogonal";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::RoundedToZero: return "RoundedToZero";
    case Errc::AllZeroSample: return "AllZeroSample";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ParseError: return "ParseError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(Normalization tag) {
  switch (tag) {
    case Normalization::raw: return "raw";
    case Normalization::trace_p: return "trace_p";
    case Normalization::det_1: return "det_1";
  }
  return "raw";
}

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw Error(Errc::DimMismatch, std::string(what) + " must be square, got " +
                                       std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_near_symmetric(const Matrix& m, const char* what) {
  const double scale = m.norm();
  if (!m.allFinite()) throw Error(Errc::InvalidArgument, std::string(what) + " has non-finite entries");
  if ((m - m.transpose()).norm() > 1e-8 * std::max(scale, 1e-300)) {
    throw Error(Errc::InvalidArgument, std::string(what) + " is not symmetric");
  }
}

Eigen::SelfAdjointEigenSolver<Matrix> eig(const Matrix& m) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::ComputeEigenvectors);
}

}  // namespace

// SymMatrix

SymMatrix::SymMatrix(Matrix m) {
  require_square(m, "symmetric matrix");
  require_near_symmetric(m, "symmetric matrix");
  m_ = symmetrize(m);
}

SymMatrix SymMatrix::identity(Index p) { return SymMatrix(Matrix::Identity(p, p)); }
SymMatrix SymMatrix::zero(Index p) { return SymMatrix(Matrix::Zero(p, p)); }
SymMatrix SymMatrix::diagonal(const Vector& d) { return SymMatrix(Matrix(d.asDiagonal())); }

bool SymMatrix::is_traceless(double rel_tol) const {
  return std::abs(trace()) <= rel_tol * std::max(frobenius(), 1e-300);
}

double SymMatrix::dot(const SymMatrix& other) const {
  if (other.dim() != dim()) throw Error(Errc::DimMismatch, "trace inner product of different sizes");
  return m_.cwiseProduct(other.m_).sum();
}

// PDMatrix

PDMatrix::PDMatrix(Matrix m, Normalization tag) : tag_(tag) {
  require_square(m, "positive definite matrix");
  if (m.rows() == 0) throw Error(Errc::InvalidArgument, "empty matrix");
  require_near_symmetric(m, "positive definite matrix");
  m_ = symmetrize(m);
  const Vector ev = sym_eigenvalues(m_);
  const double top = ev.cwiseAbs().maxCoeff();
  if (!(ev.minCoeff() > 1e-12 * top)) {
    throw Error(Errc::NotPositiveDefinite,
                "smallest eigenvalue " + std::to_string(ev.minCoeff()) + " vs largest " + std::to_string(top));
  }
  const auto p = static_cast<double>(m_.rows());
  if (tag_ == Normalization::trace_p && std::abs(m_.trace() - p) > 1e-9 * p) {
    throw Error(Errc::InvalidArgument, "trace_p tag but trace is " + std::to_string(m_.trace()));
  }
  if (tag_ == Normalization::det_1 && std::abs(ev.array().log().sum()) > 1e-9) {
    throw Error(Errc::InvalidArgument, "det_1 tag but log det is " + std::to_string(ev.array().log().sum()));
  }
}

PDMatrix PDMatrix::identity(Index p) { return PDMatrix(Matrix::Identity(p, p), Normalization::det_1); }

// Free helpers

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Vector sym_eigenvalues(const Matrix& m) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

double sym_op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return sym_eigenvalues(m).cwiseAbs().maxCoeff();
}

Matrix sym_apply(const Matrix& m, const std::function<double(double)>& f) {
  const auto es = eig(m);
  Vector d = es.eigenvalues().unaryExpr(f);
  return symmetrize(es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose());
}

double log_det_pd(const Matrix& m) {
  const Vector ev = sym_eigenvalues(m);
  if (!(ev.minCoeff() > 0.0)) throw Error(Errc::NotPositiveDefinite, "log det of a non-PD matrix");
  return ev.array().log().sum();
}

double condition_number(const Matrix& m) {
  const Vector ev = sym_eigenvalues(m);
  if (!(ev.minCoeff() > 0.0)) return std::numeric_limits<double>::infinity();
  return ev.maxCoeff() / ev.minCoeff();
}

double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

Matrix sym_exp(const Matrix& m) {
  return sym_apply(m, [](double x) { return std::exp(x); });
}

Matrix sym_log(const Matrix& m) {
  const Vector ev = sym_eigenvalues(m);
  if (!(ev.minCoeff() > 0.0)) throw Error(Errc::NotPositiveDefinite, "log of a non-PD matrix");
  return sym_apply(m, [](double x) { return std::log(x); });
}

Matrix pd_inverse(const Matrix& m) {
  return sym_apply(m, [](double x) { return 1.0 / x; });
}

Matrix pd_inverse_sqrt(const Matrix& m) {
  return sym_apply(m, [](double x) { return 1.0 / std::sqrt(x); });
}

PDMatrix mat_sqrt(const PDMatrix& a) {
  return PDMatrix(sym_apply(a.matrix(), [](double x) { return std::sqrt(x); }));
}

namespace {

Vector relative_spectrum(const PDMatrix& a, const PDMatrix& b) {
  if (a.dim() != b.dim()) {
    throw Error(Errc::DimMismatch, "error metric between " + std::to_string(a.dim()) + " and " +
                                       std::to_string(b.dim()) + " dimensional matrices");
  }
  // Solves A v = mu B v; the mu are the eigenvalues of B^{-1} A.
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(a.matrix(), b.matrix(), Eigen::EigenvaluesOnly);
  return ges.eigenvalues();
}

}  // namespace

double error_op(const PDMatrix& a, const PDMatrix& b) {
  return (1.0 - relative_spectrum(a, b).array()).abs().maxCoeff();
}

double error_frob(const PDMatrix& a, const PDMatrix& b) {
  return (1.0 - relative_spectrum(a, b).array()).matrix().norm();
}

PDMatrix normalize(const PDMatrix& a, Normalization target) {
  const auto p = static_cast<double>(a.dim());
  switch (target) {
    case Normalization::raw:
      return PDMatrix(a.matrix(), Normalization::raw);
    case Normalization::trace_p:
      return PDMatrix(a.matrix() * (p / a.matrix().trace()), Normalization::trace_p);
    case Normalization::det_1:
      return PDMatrix(a.matrix() * std::exp(-log_det_pd(a.matrix()) / p), Normalization::det_1);
  }
  return a;
}

PDMatrix geodesic_point(const PDMatrix& z, const SymMatrix& x, double t) {
  if (z.dim() != x.dim()) throw Error(Errc::DimMismatch, "geodesic direction size differs from base point");
  const Matrix root = mat_sqrt(z).matrix();
  return PDMatrix(symmetrize(root * sym_exp(t * x.matrix()) * root));
}

}  // namespace opscale
