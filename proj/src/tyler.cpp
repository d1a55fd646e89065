#include "opscale/tyler.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>

namespace opscale {

std::string_view to_string(ExistenceStatus status) {
  switch (status) {
    case ExistenceStatus::UniqueExists: return "UniqueExists";
    case ExistenceStatus::ExistsNonUnique: return "ExistsNonUnique";
    case ExistenceStatus::NoSolution: return "NoSolution";
    case ExistenceStatus::ApproxOnly: return "ApproxOnly";
    case ExistenceStatus::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

namespace {

constexpr double kMembershipTol = 1e-9;
constexpr double kRankTol = 1e-9;

Index numeric_rank(const Matrix& m) {
  if (m.cols() == 0) return 0;
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  qr.setThreshold(kRankTol);
  return qr.rank();
}

Matrix orthonormal_basis(const Matrix& m) {
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  qr.setThreshold(kRankTol);
  return Matrix(qr.householderQ()).leftCols(qr.rank());
}

Matrix gather(const Matrix& cols, const std::vector<Index>& idx) {
  Matrix out(cols.rows(), static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Index>(j)) = cols.col(idx[j]);
  return out;
}

enum class Criticality { Below, TightSplit, TightNoSplit, Above };

// Classification of one subspace (given by an orthonormal basis) against the
// unit-normalized samples.
struct Probe {
  Criticality kind = Criticality::Below;
  ExistenceWitness witness;
};

Probe probe_subspace(const Matrix& unit, const Matrix& basis) {
  const Index p = unit.rows();
  const Index n = unit.cols();
  const Index k = basis.cols();
  Probe pr;
  std::vector<Index> inside;
  std::vector<Index> outside;
  const Matrix residuals = unit - basis * (basis.transpose() * unit);
  for (Index i = 0; i < n; ++i) {
    (residuals.col(i).norm() <= kMembershipTol ? inside : outside).push_back(i);
  }
  const auto m = static_cast<Index>(inside.size());
  pr.witness = ExistenceWitness{inside, basis, k, m, static_cast<double>(k) * static_cast<double>(n) / static_cast<double>(p)};
  // Exact integer comparison of m against k n / p.
  if (m * p > k * n) {
    pr.kind = Criticality::Above;
  } else if (m * p == k * n) {
    const Matrix rest = gather(unit, outside);
    const Index rest_rank = numeric_rank(rest);
    Matrix joined(p, k + rest.cols());
    joined << basis, rest;
    const bool split = rest_rank <= p - k && numeric_rank(joined) == k + rest_rank;
    pr.kind = split ? Criticality::TightSplit : Criticality::TightNoSplit;
  }
  return pr;
}

// Folds probes into the verdict, keeping the first witness of the most severe kind.
class Classifier {
 public:
  void offer(Probe probe) {
    if (probe.kind == Criticality::Below) return;
    if (!worst_ || rank(probe.kind) > rank(worst_->kind)) worst_ = std::move(probe);
  }

  ExistenceVerdict verdict(bool exhaustive) const {
    ExistenceVerdict v;
    v.exhaustive = exhaustive;
    if (!worst_) {
      v.status = ExistenceStatus::UniqueExists;
      return v;
    }
    switch (worst_->kind) {
      case Criticality::Above: v.status = ExistenceStatus::NoSolution; break;
      case Criticality::TightNoSplit: v.status = ExistenceStatus::ApproxOnly; break;
      case Criticality::TightSplit: v.status = ExistenceStatus::ExistsNonUnique; break;
      case Criticality::Below: break;
    }
    // A tight subspace found by the partial search cannot be classified without the full enumeration.
    if (!exhaustive && worst_->kind != Criticality::Above) v.status = ExistenceStatus::Inconclusive;
    v.witness = worst_->witness;
    return v;
  }

 private:
  static int rank(Criticality c) {
    switch (c) {
      case Criticality::Below: return 0;
      case Criticality::TightSplit: return 1;
      case Criticality::TightNoSplit: return 2;
      case Criticality::Above: return 3;
    }
    return 0;
  }
  std::optional<Probe> worst_;
};

void exhaustive_spans(const Matrix& unit, Classifier& cls) {
  const Index p = unit.rows();
  const Index n = unit.cols();
  std::set<std::vector<Index>> seen;
  for (Index k = 1; k < p && k <= n; ++k) {
    std::vector<Index> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), Index{0});
    while (true) {
      const Matrix sub = gather(unit, idx);
      if (numeric_rank(sub) == k) {
        Probe pr = probe_subspace(unit, orthonormal_basis(sub));
        if (seen.insert(pr.witness.members).second) cls.offer(std::move(pr));
      }
      Index pos = k - 1;
      while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
      if (pos < 0) break;
      ++idx[static_cast<std::size_t>(pos)];
      for (Index j = pos + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

void partial_checks(const Matrix& unit, Classifier& cls) {
  const Index p = unit.rows();
  const Index n = unit.cols();

  // Span of everything.
  const Index full = numeric_rank(unit);
  if (full < p) cls.offer(probe_subspace(unit, orthonormal_basis(unit)));

  // Repeated directions: sign-canonical unit vectors, sorted, adjacent compared.
  std::vector<Vector> canon;
  canon.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    Vector c = unit.col(i);
    Index lead = 0;
    c.cwiseAbs().maxCoeff(&lead);
    if (c(lead) < 0) c = -c;
    canon.push_back(std::move(c));
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    const auto& x = canon[static_cast<std::size_t>(a)];
    const auto& y = canon[static_cast<std::size_t>(b)];
    return std::lexicographical_compare(x.data(), x.data() + x.size(), y.data(), y.data() + y.size());
  });
  for (std::size_t j = 0; j < order.size();) {
    std::size_t e = j + 1;
    while (e < order.size() &&
           (canon[static_cast<std::size_t>(order[e])] - canon[static_cast<std::size_t>(order[j])]).norm() <= kMembershipTol) {
      ++e;
    }
    if (e - j > 1 && p > 1) cls.offer(probe_subspace(unit, unit.col(order[j]).normalized()));
    j = e;
  }

  // Coordinate supports.
  if (p > 1) {
    std::set<std::vector<bool>> supports;
    for (Index i = 0; i < n; ++i) {
      std::vector<bool> s(static_cast<std::size_t>(p));
      Index count = 0;
      for (Index r = 0; r < p; ++r) {
        s[static_cast<std::size_t>(r)] = std::abs(unit(r, i)) > kMembershipTol;
        count += s[static_cast<std::size_t>(r)] ? 1 : 0;
      }
      if (count < p) supports.insert(std::move(s));
    }
    for (const auto& s : supports) {
      std::vector<Index> axes;
      for (Index r = 0; r < p; ++r) {
        if (s[static_cast<std::size_t>(r)]) axes.push_back(r);
      }
      cls.offer(probe_subspace(unit, gather(Matrix::Identity(p, p), axes)));
    }
  }

  // Leading and trailing eigenspaces of the sample scatter.
  const Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(unit * unit.transpose()));
  for (Index k = 1; k < p; ++k) {
    cls.offer(probe_subspace(unit, es.eigenvectors().leftCols(k)));
    cls.offer(probe_subspace(unit, es.eigenvectors().rightCols(k)));
  }
}

}  // namespace

ExistenceVerdict existence_check(const VectorTuple& x, Index exhaustive_limit) {
  const Matrix unit = x.unit_normalized().columns();
  Classifier cls;
  const bool exhaustive = x.n() <= exhaustive_limit;
  if (exhaustive) {
    exhaustive_spans(unit, cls);
  } else {
    partial_checks(unit, cls);
  }
  return cls.verdict(exhaustive);
}

double residual(const VectorTuple& x, const PDMatrix& s) {
  if (s.dim() != x.p()) throw Error(Errc::DimMismatch, "shape matrix size differs from the sample dimension");
  const Matrix inv = pd_inverse(s.matrix());
  const Matrix& v = x.columns();
  const Vector q = v.cwiseProduct(inv * v).colwise().sum().transpose();
  const double pn = static_cast<double>(x.p()) / static_cast<double>(x.n());
  const Matrix fixed = symmetrize(pn * v * q.cwiseInverse().asDiagonal() * v.transpose());
  return (fixed - s.matrix()).norm() / s.matrix().norm();
}

EstimateResult estimate(const VectorTuple& x, const EstimateOptions& options) {
  const VectorTuple unit = x.unit_normalized();
  const CPMap phi(unit);
  SinkhornOptions so;
  so.tol = options.tol;
  so.max_iters = options.max_iters;
  SinkhornResult run_result = run(phi, PDMatrix::identity(x.p()), so);

  const Matrix inv = pd_inverse(run_result.iterate.matrix());
  PDMatrix sigma(inv * (static_cast<double>(x.p()) / inv.trace()), Normalization::trace_p);
  const double res = residual(unit, sigma);

  ExistenceVerdict verdict;
  if (options.check_existence) {
    verdict = existence_check(unit, options.exhaustive_limit);
  } else {
    verdict.checked = false;
  }
  return EstimateResult{std::move(sigma), std::move(run_result.trace), res, std::move(verdict)};
}

PDMatrix conjugate_estimate(const VectorTuple& x, const Matrix& a, const EstimateOptions& options) {
  if (a.rows() != x.p() || a.cols() != x.p()) throw Error(Errc::DimMismatch, "A must be p x p");
  if (std::abs(a.determinant()) < 1e-12) throw Error(Errc::SingularScaling, "A is singular");
  EstimateOptions opts = options;
  opts.check_existence = false;
  const PDMatrix sigma = estimate(x, opts).sigma_hat;
  return normalize(PDMatrix(symmetrize(a * sigma.matrix() * a.transpose())), Normalization::trace_p);
}

CPMap scaled_operator(const VectorTuple& x, const PDMatrix& s) {
  if (s.dim() != x.p()) throw Error(Errc::DimMismatch, "shape matrix size differs from the sample dimension");
  Matrix z = pd_inverse_sqrt(s.matrix()) * x.columns();
  z.colwise().normalize();
  return CPMap(VectorTuple(std::move(z)));
}

}  // namespace opscale
