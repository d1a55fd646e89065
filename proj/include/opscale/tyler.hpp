#pragma once

#include <optional>
#include <vector>

#include "opscale/sinkhorn.hpp"

namespace opscale {

enum class ExistenceStatus { UniqueExists, ExistsNonUnique, NoSolution, ApproxOnly, Inconclusive };

std::string_view to_string(ExistenceStatus status);

/// A subspace of dimension k holding m of the n samples, compared against the
/// threshold k n / p.
struct ExistenceWitness {
  std::vector<Index> members;  // samples inside the subspace
  Matrix basis;                // p x k orthonormal
  Index k = 0;
  Index m = 0;
  double kn_over_p = 0.0;
};

struct ExistenceVerdict {
  ExistenceStatus status = ExistenceStatus::Inconclusive;
  std::optional<ExistenceWitness> witness;
  bool exhaustive = false;
  bool checked = true;  // false when estimate() skipped the check
};

/// Classifies solvability of the fixed-point equation.
///
/// For n <= exhaustive_limit every subspace spanned by fewer than p samples is
/// enumerated (a subspace holding at least k n / p samples always contains
/// such a span). Beyond the limit only the span of all samples, repeated
/// directions, coordinate supports and covariance eigenspaces are examined;
/// a tight subspace found there gives Inconclusive, and if none of them is
/// critical the verdict is UniqueExists with exhaustive = false.
///
///   m > k n / p for some subspace            -> NoSolution
///   m = k n / p without a complementary split -> ApproxOnly
///   m = k n / p, every such split exists      -> ExistsNonUnique
///   m < k n / p everywhere                    -> UniqueExists
ExistenceVerdict existence_check(const VectorTuple& x, Index exhaustive_limit = 16);

struct EstimateOptions {
  double tol = 1e-8;
  int max_iters = 10000;
  bool check_existence = true;
  Index exhaustive_limit = 16;
};

struct EstimateResult {
  PDMatrix sigma_hat;  // trace_p
  ConvergenceTrace trace;
  double residual = 0.0;
  ExistenceVerdict verdict;
};

/// Tyler's M-estimator: Sinkhorn scaling of the map built from the
/// unit-normalized samples, started at the identity, reported as
/// p Z^{-1} / tr Z^{-1}.
EstimateResult estimate(const VectorTuple& x, const EstimateOptions& options = {});

/// ||(p/n) sum x_i x_i^T / (x_i^T S^{-1} x_i) - S||_F / ||S||_F.
double residual(const VectorTuple& x, const PDMatrix& s);

/// trace_p normalization of A estimate(x) A^T, to be compared against the
/// estimate on {A x_i}.
PDMatrix conjugate_estimate(const VectorTuple& x, const Matrix& a, const EstimateOptions& options = {});

/// Sample map of z_i = S^{-1/2} x_i / ||S^{-1/2} x_i||.
CPMap scaled_operator(const VectorTuple& x, const PDMatrix& s);

}  // namespace opscale
