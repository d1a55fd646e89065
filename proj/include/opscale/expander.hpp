#pragma once

#include <cstdint>
#include <vector>

#include "opscale/cpmap.hpp"

namespace opscale {

struct ExpansionReport {
  double eps = 0.0;
  double lambda = 0.0;         // 1 - traceless_sup * sqrt(np) / s
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double size = 0.0;
  double traceless_sup = 0.0;  // sup over traceless X of ||Phi(X)||_F / ||X||_F
};

/// Exact expansion data from the dense matrixization of phi. For p = 1 the
/// traceless space is empty: traceless_sup = 0 and lambda = 1.
ExpansionReport expansion_constant(const CPMap& phi, const SpectralBudget& budget = {});

struct SingularPair {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
};

/// Top two singular values of phi as a linear map on symmetric matrices.
SingularPair spectral_gap(const CPMap& phi, const SpectralBudget& budget = {});

/// ||a - b|| as linear maps (Frobenius to Frobenius). Both maps must have the
/// same variant and dimensions.
double operator_distance(const CPMap& a, const CPMap& b, const SpectralBudget& budget = {});

/// n x p matrix with entries (U v_i)_j^2. Throws NotOrthogonal unless
/// ||U^T U - I|| <= 1e-10.
Matrix b_matrix(const VectorTuple& v, const Matrix& u);

/// sup over x in R^p with <x, 1> = 0 of ||B x|| / ||x|| for an n x p matrix B.
double mean_zero_gain(const Matrix& b);

/// A sample subset S together with an orthogonal projection pi.
struct Cut {
  std::vector<bool> in_s;
  Matrix pi;

  Index rank() const;
  /// Throws InvalidArgument unless pi is a symmetric idempotent within 1e-10.
  void validate() const;
};

/// phi(S, pi) = cut(S, pi) / min{vol(S, pi), vol(S^c, I - pi)}; +inf when
/// the denominator vanishes. Vectors must be unit length; RankTooLarge when
/// rank(pi) > p/2.
double conductance(const VectorTuple& v, const Cut& cut);

struct CandidateBudget {
  Index span_size = 2;           // largest vector subset whose span is tried
  Index random_count = 8;        // Haar-random projections per rank
  std::uint64_t seed = 0;
  Index exact_subset_limit = 20; // brute-force S when n is at most this
  Index max_span_candidates = 20000;
  Index max_coordinate_subsets = 1 << 14;
};

struct CheegerBound {
  double value = 0.0;
  Cut witness;
  bool exact_subsets = false;  // S optimized by enumeration rather than threshold sweep
  Index candidates = 0;
};

/// Upper bound on ch(v) = min over cuts with rank(pi) <= p/2 of phi(S, pi),
/// searched over coordinate projections in the standard and covariance
/// eigenbases, spans of small vector subsets, and Haar-random projections.
CheegerBound cheeger_upper_bound(const VectorTuple& v, const CandidateBudget& budget = {});

/// Best S for a fixed projection. Exposed for tests.
CheegerBound best_subset_for_projection(const VectorTuple& v, const Matrix& pi, bool exhaustive);

struct BipartiteCheeger {
  double value = 0.0;
  std::vector<bool> rows;  // T, |T| <= rows/2
  std::vector<bool> cols;  // S
  bool exact = false;
};

/// Cheeger constant of the weighted bipartite graph with p' x n' nonnegative
/// weights b: rows are one side (T), columns the other (S).
BipartiteCheeger bipartite_cheeger(const Matrix& b, Index exact_threshold = 24);

/// phi(S, T) for a given bipartite cut.
double bipartite_conductance(const Matrix& b, const std::vector<bool>& rows, const std::vector<bool>& cols);

}  // namespace opscale
