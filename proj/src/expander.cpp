#include "opscale/expander.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "opscale/random.hpp"

namespace opscale {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Eigenvalues (descending, clamped at zero) of M^T M, i.e. squared singular values.
Vector gram_spectrum(const Matrix& m) {
  const Matrix gram = symmetrize(m.transpose() * m);
  Vector ev = sym_eigenvalues(gram).reverse();
  return ev.cwiseMax(0.0);
}

// Projector onto the traceless subspace in symmetric coordinates.
Matrix traceless_projector(Index p) {
  const Index d = p * (p + 1) / 2;
  Vector t = Vector::Zero(d);
  for (Index k : sym_diagonal_coords(p)) t(k) = 1.0;
  return Matrix::Identity(d, d) - t * t.transpose() / static_cast<double>(p);
}

double traceless_sup_of(const Matrix& m, Index p) {
  if (p == 1) return 0.0;
  const Matrix proj = traceless_projector(p);
  return std::sqrt(gram_spectrum(m * proj)(0));
}

}  // namespace

SingularPair spectral_gap(const CPMap& phi, const SpectralBudget& budget) {
  const Vector ev = gram_spectrum(as_matrix(phi, budget));
  SingularPair sp;
  sp.sigma1 = std::sqrt(ev(0));
  sp.sigma2 = ev.size() > 1 ? std::sqrt(ev(1)) : 0.0;
  return sp;
}

ExpansionReport expansion_constant(const CPMap& phi, const SpectralBudget& budget) {
  const Matrix m = as_matrix(phi, budget);
  const Vector ev = gram_spectrum(m);
  ExpansionReport r;
  r.size = size(phi);
  r.eps = balancedness(phi).eps;
  r.sigma1 = std::sqrt(ev(0));
  r.sigma2 = ev.size() > 1 ? std::sqrt(ev(1)) : 0.0;
  const Index p = phi.in_dim();
  if (p == 1) {
    r.traceless_sup = 0.0;
    r.lambda = 1.0;
    return r;
  }
  r.traceless_sup = traceless_sup_of(m, p);
  const double np = static_cast<double>(phi.out_dim()) * static_cast<double>(p);
  r.lambda = 1.0 - r.traceless_sup * std::sqrt(np) / r.size;
  return r;
}

double operator_distance(const CPMap& a, const CPMap& b, const SpectralBudget& budget) {
  if (a.is_diagonal_output() != b.is_diagonal_output() || a.in_dim() != b.in_dim() ||
      a.out_dim() != b.out_dim()) {
    throw Error(Errc::DimMismatch, "operator_distance needs maps of the same shape");
  }
  return std::sqrt(gram_spectrum(as_matrix(a, budget) - as_matrix(b, budget))(0));
}

Matrix b_matrix(const VectorTuple& v, const Matrix& u) {
  const Index p = v.p();
  if (u.rows() != p || u.cols() != p) throw Error(Errc::DimMismatch, "U must be p x p");
  if ((u.transpose() * u - Matrix::Identity(p, p)).norm() > 1e-10) {
    throw Error(Errc::NotOrthogonal, "U^T U differs from the identity");
  }
  return (u * v.columns()).array().square().matrix().transpose();
}

double mean_zero_gain(const Matrix& b) {
  const Index p = b.cols();
  if (p <= 1) return 0.0;
  const Matrix center = Matrix::Identity(p, p) - Matrix::Constant(p, p, 1.0 / static_cast<double>(p));
  return std::sqrt(gram_spectrum(b * center)(0));
}

// Cuts

Index Cut::rank() const { return static_cast<Index>(std::llround(pi.trace())); }

void Cut::validate() const {
  if (pi.rows() != pi.cols()) throw Error(Errc::DimMismatch, "projection must be square");
  const double scale = std::max(1.0, pi.norm());
  if ((pi - pi.transpose()).norm() > 1e-10 * scale || (pi * pi - pi).norm() > 1e-10 * scale) {
    throw Error(Errc::InvalidArgument, "pi is not an orthogonal projection");
  }
}

namespace {

void require_unit(const VectorTuple& v) {
  if (!v.is_unit(1e-9)) throw Error(Errc::InvalidArgument, "conductance requires unit-norm vectors");
}

// Ratio with the +inf convention for an empty denominator.
double ratio(double cut, double vol_a, double vol_b) {
  const double denom = std::min(vol_a, vol_b);
  if (denom <= 0.0) return kInf;
  return cut / denom;
}

}  // namespace

double conductance(const VectorTuple& v, const Cut& cut) {
  require_unit(v);
  cut.validate();
  if (cut.pi.rows() != v.p()) throw Error(Errc::DimMismatch, "projection size differs from p");
  if (static_cast<Index>(cut.in_s.size()) != v.n()) throw Error(Errc::DimMismatch, "subset mask size differs from n");
  if (2 * cut.rank() > v.p()) {
    throw Error(Errc::RankTooLarge, "rank " + std::to_string(cut.rank()) + " > p/2 with p = " + std::to_string(v.p()));
  }
  const Matrix pv = cut.pi * v.columns();
  const Matrix qv = v.columns() - pv;
  double vol_s = 0.0;
  double vol_sbar = 0.0;
  double c = 0.0;
  for (Index i = 0; i < v.n(); ++i) {
    const double in_pi = pv.col(i).squaredNorm();
    const double out_pi = qv.col(i).squaredNorm();
    const double w = v.vector(i).squaredNorm();
    vol_s += in_pi;
    vol_sbar += out_pi;
    if (cut.in_s[static_cast<std::size_t>(i)]) {
      vol_s += w;
      c += out_pi;
    } else {
      vol_sbar += w;
      c += in_pi;
    }
  }
  return ratio(c, vol_s, vol_sbar);
}

CheegerBound best_subset_for_projection(const VectorTuple& v, const Matrix& pi, bool exhaustive) {
  const Index n = v.n();
  Vector a(n);  // ||pi v_i||^2
  Vector w(n);  // ||v_i||^2
  const Matrix pv = pi * v.columns();
  for (Index i = 0; i < n; ++i) {
    a(i) = pv.col(i).squaredNorm();
    w(i) = v.vector(i).squaredNorm();
  }
  const double a_sum = a.sum();
  const double w_sum = w.sum();

  CheegerBound best;
  best.value = kInf;
  best.witness.pi = pi;
  best.witness.in_s.assign(static_cast<std::size_t>(n), false);
  best.exact_subsets = exhaustive;
  best.candidates = 1;

  // With S empty: cut = sum a_i, vol(S) = sum a_i, vol(S^c) = sum (w - a) + sum w.
  double c = a_sum;
  double vol_s = a_sum;
  double vol_sbar = (w_sum - a_sum) + w_sum;
  best.value = ratio(c, vol_s, vol_sbar);

  auto toggle = [&](Index i, bool entering) {
    const double sign = entering ? 1.0 : -1.0;
    c += sign * (w(i) - 2.0 * a(i));
    vol_s += sign * w(i);
    vol_sbar -= sign * w(i);
  };

  if (exhaustive) {
    if (n > 30) throw Error(Errc::BudgetExceeded, "exhaustive subset search needs n <= 30");
    std::vector<bool> mask(static_cast<std::size_t>(n), false);
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t k = 1; k < total; ++k) {
      const auto bit = static_cast<Index>(__builtin_ctzll(k));
      const bool entering = !mask[static_cast<std::size_t>(bit)];
      mask[static_cast<std::size_t>(bit)] = entering;
      toggle(bit, entering);
      const double value = ratio(c, vol_s, vol_sbar);
      if (value < best.value) {
        best.value = value;
        best.witness.in_s = mask;
      }
    }
    return best;
  }

  // Threshold sweep: add samples in decreasing order of their pi-mass fraction.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return a(x) / w(x) > a(y) / w(y); });
  Index best_prefix = 0;
  for (Index k = 0; k < n; ++k) {
    toggle(order[static_cast<std::size_t>(k)], true);
    const double value = ratio(c, vol_s, vol_sbar);
    if (value < best.value) {
      best.value = value;
      best_prefix = k + 1;
    }
  }
  for (Index k = 0; k < best_prefix; ++k) best.witness.in_s[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = true;
  return best;
}

namespace {

// Calls fn(subset) for every subset of {0..p-1} with 1 <= size <= max_size,
// in order of size then lexicographically, stopping after `limit` subsets.
template <typename Fn>
Index for_each_small_subset(Index p, Index max_size, Index limit, Fn&& fn) {
  Index visited = 0;
  for (Index k = 1; k <= max_size && k <= p; ++k) {
    std::vector<Index> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), Index{0});
    while (true) {
      if (visited >= limit) return visited;
      fn(idx);
      ++visited;
      Index pos = k - 1;
      while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == p - k + pos) --pos;
      if (pos < 0) break;
      ++idx[static_cast<std::size_t>(pos)];
      for (Index j = pos + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return visited;
}

Matrix projector_onto_columns(const Matrix& basis, const std::vector<Index>& cols) {
  Matrix q(basis.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) q.col(static_cast<Index>(j)) = basis.col(cols[j]);
  return symmetrize(q * q.transpose());
}

}  // namespace

CheegerBound cheeger_upper_bound(const VectorTuple& v, const CandidateBudget& budget) {
  require_unit(v);
  const Index p = v.p();
  const Index n = v.n();
  const Index half = p / 2;
  const bool exhaustive = n <= budget.exact_subset_limit;

  CheegerBound best;
  best.value = kInf;
  best.exact_subsets = exhaustive;
  Index candidates = 0;
  auto consider = [&](const Matrix& pi) {
    ++candidates;
    CheegerBound b = best_subset_for_projection(v, pi, exhaustive);
    if (b.value < best.value) {
      best.value = b.value;
      best.witness = std::move(b.witness);
    }
  };

  consider(Matrix::Zero(p, p));

  // (a) coordinate projections, standard basis then covariance eigenbasis.
  const Matrix standard = Matrix::Identity(p, p);
  const Matrix eigenbasis =
      Eigen::SelfAdjointEigenSolver<Matrix>(symmetrize(v.columns() * v.columns().transpose())).eigenvectors();
  for (const Matrix* basis : {&standard, &eigenbasis}) {
    for_each_small_subset(p, half, budget.max_coordinate_subsets,
                          [&](const std::vector<Index>& cols) { consider(projector_onto_columns(*basis, cols)); });
  }

  // (b) spans of small vector subsets; dependent subsets repeat a smaller span.
  const Index span_size = std::min(half, budget.span_size);
  for_each_small_subset(n, span_size, budget.max_span_candidates, [&](const std::vector<Index>& members) {
    Matrix sub(p, static_cast<Index>(members.size()));
    for (std::size_t j = 0; j < members.size(); ++j) sub.col(static_cast<Index>(j)) = v.vector(members[j]);
    Eigen::ColPivHouseholderQR<Matrix> qr(sub);
    qr.setThreshold(1e-9);
    if (qr.rank() != sub.cols()) return;
    const Matrix q = Matrix(qr.householderQ()).leftCols(sub.cols());
    consider(symmetrize(q * q.transpose()));
  });

  // (c) Haar-random projections; one stream per rank so larger budgets extend smaller ones.
  for (Index r = 1; r <= half; ++r) {
    Rng rng(budget.seed, {0x636865656765ULL, static_cast<std::uint64_t>(r)});
    for (Index k = 0; k < budget.random_count; ++k) consider(haar_projection(p, r, rng));
  }

  best.candidates = candidates;
  return best;
}

// Bipartite graphs

double bipartite_conductance(const Matrix& b, const std::vector<bool>& rows, const std::vector<bool>& cols) {
  if (static_cast<Index>(rows.size()) != b.rows() || static_cast<Index>(cols.size()) != b.cols()) {
    throw Error(Errc::DimMismatch, "cut masks do not match the weight matrix");
  }
  double c = 0.0;
  double vol_a = 0.0;
  double vol_b = 0.0;
  for (Index i = 0; i < b.rows(); ++i) {
    for (Index j = 0; j < b.cols(); ++j) {
      const double w = b(i, j);
      const bool ti = rows[static_cast<std::size_t>(i)];
      const bool sj = cols[static_cast<std::size_t>(j)];
      if (ti) vol_a += w; else vol_b += w;
      if (sj) vol_a += w; else vol_b += w;
      if (ti != sj) c += w;
    }
  }
  return ratio(c, vol_a, vol_b);
}

BipartiteCheeger bipartite_cheeger(const Matrix& b, Index exact_threshold) {
  if ((b.array() < 0.0).any()) throw Error(Errc::InvalidArgument, "bipartite weights must be nonnegative");
  const Index pr = b.rows();
  const Index nc = b.cols();
  const Vector row_sum = b.rowwise().sum();
  const Vector col_sum = b.colwise().sum().transpose();
  const double total = row_sum.sum();
  const bool exact = pr + nc <= exact_threshold;

  BipartiteCheeger best;
  best.value = kInf;
  best.exact = exact;
  best.rows.assign(static_cast<std::size_t>(pr), false);
  best.cols.assign(static_cast<std::size_t>(nc), false);

  auto solve_for_rows = [&](const std::vector<bool>& t) {
    // Per-column weight into T and out of T.
    Vector into_t = Vector::Zero(nc);
    double vol_t = 0.0;
    for (Index i = 0; i < pr; ++i) {
      if (!t[static_cast<std::size_t>(i)]) continue;
      into_t += b.row(i).transpose();
      vol_t += row_sum(i);
    }
    const Vector out_t = col_sum - into_t;
    // S empty: cut = weight between T and all columns.
    double c = into_t.sum();
    double vol_a = vol_t;
    double vol_b = (total - vol_t) + total;
    auto toggle = [&](Index j, bool entering) {
      const double sign = entering ? 1.0 : -1.0;
      c += sign * (out_t(j) - into_t(j));
      vol_a += sign * col_sum(j);
      vol_b -= sign * col_sum(j);
    };
    auto offer = [&](const std::vector<bool>& s) {
      const double value = ratio(c, vol_a, vol_b);
      if (value < best.value) {
        best.value = value;
        best.rows = t;
        best.cols = s;
      }
    };
    std::vector<bool> s(static_cast<std::size_t>(nc), false);
    offer(s);
    if (exact) {
      const std::uint64_t total_masks = std::uint64_t{1} << nc;
      for (std::uint64_t k = 1; k < total_masks; ++k) {
        const auto bit = static_cast<Index>(__builtin_ctzll(k));
        const bool entering = !s[static_cast<std::size_t>(bit)];
        s[static_cast<std::size_t>(bit)] = entering;
        toggle(bit, entering);
        offer(s);
      }
      return;
    }
    std::vector<Index> order(static_cast<std::size_t>(nc));
    std::iota(order.begin(), order.end(), Index{0});
    auto key = [&](Index j) { return col_sum(j) > 0 ? (into_t(j) - out_t(j)) / col_sum(j) : -kInf; };
    std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return key(x) > key(y); });
    for (Index j : order) {
      toggle(j, true);
      s[static_cast<std::size_t>(j)] = true;
      offer(s);
    }
  };

  // T ranges over all row subsets of size <= pr/2 (including the empty set);
  // past 2^16 row subsets only singletons and prefixes by row mass are tried.
  std::vector<bool> t(static_cast<std::size_t>(pr), false);
  solve_for_rows(t);
  const Index limit = exact || pr <= 16 ? std::numeric_limits<Index>::max() : pr;
  for_each_small_subset(pr, pr / 2, limit, [&](const std::vector<Index>& idx) {
    std::fill(t.begin(), t.end(), false);
    for (Index i : idx) t[static_cast<std::size_t>(i)] = true;
    solve_for_rows(t);
  });
  if (!exact && pr > 16) {
    std::vector<Index> order(static_cast<std::size_t>(pr));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return row_sum(x) < row_sum(y); });
    std::fill(t.begin(), t.end(), false);
    for (Index k = 0; k < pr / 2; ++k) {
      t[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = true;
      solve_for_rows(t);
    }
  }
  return best;
}

}  // namespace opscale
