#pragma once

#include <variant>
#include <vector>

#include "opscale/linalg.hpp"

namespace opscale {

/// n sample vectors in R^p, stored as the columns of a p x n matrix.
class VectorTuple {
 public:
  VectorTuple() = default;
  /// Columns are the vectors. Throws InvalidArgument on empty input and
  /// AllZeroSample if some column has zero norm.
  explicit VectorTuple(Matrix columns);

  static VectorTuple from_rows(const Matrix& rows) { return VectorTuple(rows.transpose()); }

  Index p() const { return v_.rows(); }
  Index n() const { return v_.cols(); }
  const Matrix& columns() const { return v_; }
  auto vector(Index i) const { return v_.col(i); }

  /// Copy with every vector rescaled to unit length.
  VectorTuple unit_normalized() const;
  bool is_unit(double tol = 1e-9) const;

 private:
  Matrix v_;
};

/// Completely positive map X -> sum_i A_i X A_i^T.
///
/// The DiagonalOutput variant is the sample map X -> diag(<v_i, X v_i>),
/// whose Kraus operators are e_i v_i^T; it never materializes n x n outputs
/// on the hot paths. GeneralKraus holds explicit out_dim x in_dim operators.
class CPMap {
 public:
  struct Kraus {
    std::vector<Matrix> ops;
  };

  explicit CPMap(VectorTuple vectors);
  explicit CPMap(std::vector<Matrix> kraus);

  Index in_dim() const { return in_dim_; }
  Index out_dim() const { return out_dim_; }
  bool is_diagonal_output() const { return std::holds_alternative<VectorTuple>(rep_); }

  const VectorTuple& vectors() const { return std::get<VectorTuple>(rep_); }
  const std::vector<Matrix>& kraus() const { return std::get<Kraus>(rep_).ops; }

  /// Diagonal of apply(Z) for DiagonalOutput maps: entries v_i^T Z v_i.
  Vector apply_diagonal(const Matrix& z) const;
  /// apply_dual(diag(w)) for DiagonalOutput maps: sum_i w_i v_i v_i^T.
  Matrix apply_dual_diagonal(const Vector& w) const;

 private:
  std::variant<VectorTuple, Kraus> rep_;
  Index in_dim_ = 0;
  Index out_dim_ = 0;
};

/// Left/right scaling factors; Phi_{L,R}(X) = R Phi(L^T X L) R^T.
struct ScalingPair {
  Matrix left;   // p x p
  Matrix right;  // n x n, diagonal for DiagonalOutput maps
};

SymMatrix apply(const CPMap& phi, const SymMatrix& z);
SymMatrix apply_dual(const CPMap& phi, const SymMatrix& w);

/// s(Phi) = tr Phi(I_p).
double size(const CPMap& phi);

struct Balancedness {
  double left = 0.0;   // (n/s) ||Phi(I_p) - (s/n) I_n||_op
  double right = 0.0;  // (p/s) ||Phi*(I_n) - (s/p) I_p||_op
  double eps = 0.0;    // max of the two
};

Balancedness balancedness(const CPMap& phi);

/// Phi_{L,R}. DiagonalOutput maps stay DiagonalOutput: vector i becomes
/// R_ii L v_i, so R must be diagonal. Throws SingularScaling when
/// |det L| or |det R| is below 1e-12.
CPMap scale(const CPMap& phi, const ScalingPair& lr);

/// Limits on the dense matrixization used for exact spectral work.
struct SpectralBudget {
  Index max_p = 64;
  Index max_n_kraus = 256;
  Index max_n_diagonal = 4096;
};

/// Orthonormal basis of symmetric p x p matrices: E_ii and (E_ij + E_ji)/sqrt 2
/// for i < j, in lexicographic (i, j) order. Returns the coordinate vector.
Vector sym_to_coords(const Matrix& m);
Matrix coords_to_sym(const Vector& c, Index p);
/// Indices of the diagonal basis elements among the symmetric coordinates.
std::vector<Index> sym_diagonal_coords(Index p);

/// Matrix of Phi from symmetric p x p input coordinates to output coordinates.
/// For DiagonalOutput maps the output space is the n diagonal matrices E_ii;
/// for GeneralKraus it is the symmetric n x n matrices in the basis above.
Matrix as_matrix(const CPMap& phi, const SpectralBudget& budget = {});

/// Throws BudgetExceeded (naming the limiting dimension) if as_matrix would refuse.
void check_budget(const CPMap& phi, const SpectralBudget& budget);

}  // namespace opscale
