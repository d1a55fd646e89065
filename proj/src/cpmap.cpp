#include "opscale/cpmap.hpp"

#include <cmath>
#include <string>

namespace opscale {

VectorTuple::VectorTuple(Matrix columns) : v_(std::move(columns)) {
  if (v_.rows() < 1 || v_.cols() < 1) throw Error(Errc::InvalidArgument, "vector tuple needs p >= 1 and n >= 1");
  if (!v_.allFinite()) throw Error(Errc::InvalidArgument, "vector tuple has non-finite entries");
  for (Index i = 0; i < v_.cols(); ++i) {
    if (v_.col(i).squaredNorm() == 0.0) {
      throw Error(Errc::AllZeroSample, "sample " + std::to_string(i) + " is the zero vector");
    }
  }
}

VectorTuple VectorTuple::unit_normalized() const {
  Matrix u = v_;
  u.colwise().normalize();
  return VectorTuple(std::move(u));
}

bool VectorTuple::is_unit(double tol) const {
  return ((v_.colwise().norm().array() - 1.0).abs() <= tol).all();
}

CPMap::CPMap(VectorTuple vectors) : in_dim_(vectors.p()), out_dim_(vectors.n()) {
  rep_ = std::move(vectors);
}

CPMap::CPMap(std::vector<Matrix> kraus) {
  if (kraus.empty()) throw Error(Errc::InvalidArgument, "CP map needs at least one Kraus operator");
  out_dim_ = kraus.front().rows();
  in_dim_ = kraus.front().cols();
  if (in_dim_ < 1 || out_dim_ < 1) throw Error(Errc::InvalidArgument, "empty Kraus operator");
  for (const auto& a : kraus) {
    if (a.rows() != out_dim_ || a.cols() != in_dim_) {
      throw Error(Errc::DimMismatch, "Kraus operators must share one shape");
    }
  }
  rep_ = Kraus{std::move(kraus)};
}

Vector CPMap::apply_diagonal(const Matrix& z) const {
  const Matrix& v = vectors().columns();
  return (v.cwiseProduct(z * v)).colwise().sum().transpose();
}

Matrix CPMap::apply_dual_diagonal(const Vector& w) const {
  const Matrix& v = vectors().columns();
  return symmetrize(v * w.asDiagonal() * v.transpose());
}

SymMatrix apply(const CPMap& phi, const SymMatrix& z) {
  if (z.dim() != phi.in_dim()) {
    throw Error(Errc::DimMismatch, "apply: input is " + std::to_string(z.dim()) + ", map expects " +
                                       std::to_string(phi.in_dim()));
  }
  if (phi.is_diagonal_output()) return SymMatrix::diagonal(phi.apply_diagonal(z.matrix()));
  Matrix out = Matrix::Zero(phi.out_dim(), phi.out_dim());
  for (const auto& a : phi.kraus()) out.noalias() += a * z.matrix() * a.transpose();
  return SymMatrix(symmetrize(out));
}

SymMatrix apply_dual(const CPMap& phi, const SymMatrix& w) {
  if (w.dim() != phi.out_dim()) {
    throw Error(Errc::DimMismatch, "apply_dual: input is " + std::to_string(w.dim()) + ", map expects " +
                                       std::to_string(phi.out_dim()));
  }
  if (phi.is_diagonal_output()) {
    // Only the diagonal of W is seen through diagonal Kraus outputs.
    return SymMatrix(phi.apply_dual_diagonal(w.matrix().diagonal()));
  }
  Matrix out = Matrix::Zero(phi.in_dim(), phi.in_dim());
  for (const auto& a : phi.kraus()) out.noalias() += a.transpose() * w.matrix() * a;
  return SymMatrix(symmetrize(out));
}

double size(const CPMap& phi) {
  if (phi.is_diagonal_output()) return phi.vectors().columns().squaredNorm();
  double s = 0.0;
  for (const auto& a : phi.kraus()) s += a.squaredNorm();
  return s;
}

Balancedness balancedness(const CPMap& phi) {
  const double s = size(phi);
  const auto n = static_cast<double>(phi.out_dim());
  const auto p = static_cast<double>(phi.in_dim());
  Balancedness b;
  if (phi.is_diagonal_output()) {
    const Vector out = phi.vectors().columns().colwise().squaredNorm().transpose();
    b.left = (n / s) * (out.array() - s / n).abs().maxCoeff();
    const Matrix dual = phi.apply_dual_diagonal(Vector::Ones(phi.out_dim()));
    b.right = (p / s) * sym_op_norm(dual - (s / p) * Matrix::Identity(phi.in_dim(), phi.in_dim()));
  } else {
    const Matrix out = apply(phi, SymMatrix::identity(phi.in_dim())).matrix();
    b.left = (n / s) * sym_op_norm(out - (s / n) * Matrix::Identity(phi.out_dim(), phi.out_dim()));
    const Matrix dual = apply_dual(phi, SymMatrix::identity(phi.out_dim())).matrix();
    b.right = (p / s) * sym_op_norm(dual - (s / p) * Matrix::Identity(phi.in_dim(), phi.in_dim()));
  }
  b.eps = std::max(b.left, b.right);
  return b;
}

CPMap scale(const CPMap& phi, const ScalingPair& lr) {
  const Matrix& l = lr.left;
  const Matrix& r = lr.right;
  if (l.rows() != phi.in_dim() || l.cols() != phi.in_dim()) {
    throw Error(Errc::DimMismatch, "left scaling must be " + std::to_string(phi.in_dim()) + " square");
  }
  if (r.rows() != phi.out_dim() || r.cols() != phi.out_dim()) {
    throw Error(Errc::DimMismatch, "right scaling must be " + std::to_string(phi.out_dim()) + " square");
  }
  if (std::abs(l.determinant()) < 1e-12) throw Error(Errc::SingularScaling, "left scaling is singular");

  if (phi.is_diagonal_output()) {
    const Vector rd = r.diagonal();
    if ((r - Matrix(rd.asDiagonal())).norm() != 0.0) {
      throw Error(Errc::InvalidArgument, "right scaling of a diagonal-output map must be diagonal");
    }
    // det of a diagonal matrix in log space; n can be in the thousands.
    if ((rd.array() == 0.0).any() || rd.array().abs().log().sum() < std::log(1e-12)) {
      throw Error(Errc::SingularScaling, "right scaling is singular");
    }
    Matrix scaled = l * phi.vectors().columns();
    scaled *= rd.asDiagonal();
    return CPMap(VectorTuple(std::move(scaled)));
  }
  if (std::abs(r.determinant()) < 1e-12) throw Error(Errc::SingularScaling, "right scaling is singular");
  std::vector<Matrix> ops;
  ops.reserve(phi.kraus().size());
  for (const auto& a : phi.kraus()) ops.push_back(r * a * l.transpose());
  return CPMap(std::move(ops));
}

Vector sym_to_coords(const Matrix& m) {
  const Index p = m.rows();
  Vector c(p * (p + 1) / 2);
  Index k = 0;
  for (Index i = 0; i < p; ++i) {
    for (Index j = i; j < p; ++j) {
      c(k++) = (i == j) ? m(i, i) : std::sqrt(2.0) * 0.5 * (m(i, j) + m(j, i));
    }
  }
  return c;
}

Matrix coords_to_sym(const Vector& c, Index p) {
  if (c.size() != p * (p + 1) / 2) throw Error(Errc::DimMismatch, "coordinate vector has the wrong length");
  Matrix m(p, p);
  Index k = 0;
  for (Index i = 0; i < p; ++i) {
    for (Index j = i; j < p; ++j) {
      if (i == j) {
        m(i, i) = c(k++);
      } else {
        m(i, j) = m(j, i) = c(k++) / std::sqrt(2.0);
      }
    }
  }
  return m;
}

std::vector<Index> sym_diagonal_coords(Index p) {
  std::vector<Index> idx;
  Index k = 0;
  for (Index i = 0; i < p; ++i) {
    idx.push_back(k);
    k += p - i;
  }
  return idx;
}

void check_budget(const CPMap& phi, const SpectralBudget& budget) {
  if (phi.in_dim() > budget.max_p) {
    throw Error(Errc::BudgetExceeded, "p = " + std::to_string(phi.in_dim()) + " exceeds max_p = " +
                                          std::to_string(budget.max_p));
  }
  const Index max_n = phi.is_diagonal_output() ? budget.max_n_diagonal : budget.max_n_kraus;
  if (phi.out_dim() > max_n) {
    throw Error(Errc::BudgetExceeded, "n = " + std::to_string(phi.out_dim()) + " exceeds max_n = " +
                                          std::to_string(max_n));
  }
}

Matrix as_matrix(const CPMap& phi, const SpectralBudget& budget) {
  check_budget(phi, budget);
  const Index p = phi.in_dim();
  const Index dim_in = p * (p + 1) / 2;

  if (phi.is_diagonal_output()) {
    const Matrix& v = phi.vectors().columns();
    Matrix m(phi.out_dim(), dim_in);
    Index k = 0;
    for (Index a = 0; a < p; ++a) {
      for (Index b = a; b < p; ++b) {
        if (a == b) {
          m.col(k++) = v.row(a).array().square().transpose();
        } else {
          m.col(k++) = std::sqrt(2.0) * v.row(a).cwiseProduct(v.row(b)).transpose();
        }
      }
    }
    return m;
  }

  const Index n = phi.out_dim();
  Matrix m(n * (n + 1) / 2, dim_in);
  for (Index k = 0; k < dim_in; ++k) {
    const Matrix basis = coords_to_sym(Vector::Unit(dim_in, k), p);
    m.col(k) = sym_to_coords(apply(phi, SymMatrix(basis)).matrix());
  }
  return m;
}

}  // namespace opscale
