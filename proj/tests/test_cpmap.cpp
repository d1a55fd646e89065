#include "doctest.h"
#include "helpers.hpp"
#include "opscale/cpmap.hpp"

using namespace opscale;
using testutil::random_pd;
using testutil::random_sym;
using testutil::tuple_of;

namespace {

// Independent oracles: plain summation over the vectors / Kraus operators.
Matrix oracle_apply_vectors(const Matrix& v, const Matrix& z) {
  Matrix out = Matrix::Zero(v.cols(), v.cols());
  for (Index i = 0; i < v.cols(); ++i) {
    double q = 0;
    for (Index a = 0; a < v.rows(); ++a)
      for (Index b = 0; b < v.rows(); ++b) q += v(a, i) * z(a, b) * v(b, i);
    out(i, i) = q;
  }
  return out;
}

Matrix oracle_apply_kraus(const std::vector<Matrix>& ops, const Matrix& z) {
  Matrix out = Matrix::Zero(ops.front().rows(), ops.front().rows());
  for (const auto& a : ops) out += a * z * a.transpose();
  return out;
}

std::vector<Matrix> random_kraus(Index p, Index n, Index count, Rng& rng) {
  std::vector<Matrix> ops;
  for (Index i = 0; i < count; ++i) ops.push_back(rng.gaussian(n, p));
  return ops;
}

}  // namespace

TEST_CASE("VectorTuple validation") {
  CHECK_THROWS_AS(VectorTuple(Matrix(2, 0)), Error);
  Matrix z = Matrix::Ones(2, 3);
  z.col(1).setZero();
  try {
    VectorTuple bad(z);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::AllZeroSample);
  }
  const auto x = tuple_of({{3, 4}, {0, 2}});
  CHECK(x.p() == 2);
  CHECK(x.n() == 2);
  CHECK_FALSE(x.is_unit());
  CHECK(x.unit_normalized().is_unit());
  CHECK(x.unit_normalized().vector(0)(0) == doctest::Approx(0.6));
}

TEST_CASE("apply examples") {
  const CPMap basis(tuple_of({{1, 0}, {0, 1}}));
  CHECK((apply(basis, SymMatrix::identity(2)).matrix() - Matrix::Identity(2, 2)).norm() < 1e-15);
  const CPMap three(tuple_of({{1, 0}, {1, 0}, {0, 1}}));
  Vector d(2);
  d << 2.5, -1.5;
  const Matrix out = apply(three, SymMatrix::diagonal(d)).matrix();
  Vector expected(3);
  expected << 2.5, 2.5, -1.5;
  CHECK((out - Matrix(expected.asDiagonal())).norm() < 1e-15);
}

TEST_CASE("apply matches summation oracle") {
  Rng rng(21);
  for (int t = 0; t < 10; ++t) {
    const Matrix v = rng.gaussian(4, 7);
    const Matrix z = random_sym(4, rng);
    const CPMap phi{VectorTuple(v)};
    CHECK((apply(phi, SymMatrix(z)).matrix() - oracle_apply_vectors(v, z)).norm() <= 1e-12 * (1 + z.norm()) * v.squaredNorm());
    const auto ops = random_kraus(3, 5, 4, rng);
    const Matrix z3 = random_sym(3, rng);
    const CPMap k(ops);
    CHECK((apply(k, SymMatrix(z3)).matrix() - oracle_apply_kraus(ops, z3)).norm() <= 1e-10);
  }
}

TEST_CASE("apply_dual examples") {
  const CPMap basis(tuple_of({{1, 0}, {0, 1}}));
  CHECK((apply_dual(basis, SymMatrix::identity(2)).matrix() - Matrix::Identity(2, 2)).norm() < 1e-15);
  const CPMap three(tuple_of({{1, 0}, {1, 0}, {0, 1}}));
  Vector d(2);
  d << 2, 1;
  CHECK((apply_dual(three, SymMatrix::identity(3)).matrix() - Matrix(d.asDiagonal())).norm() < 1e-15);
}

TEST_CASE("adjointness over 100 random pairs") {
  Rng rng(22);
  for (int t = 0; t < 100; ++t) {
    const bool diag = t % 2 == 0;
    const Index p = 2 + t % 4;
    const Index n = 3 + t % 5;
    const CPMap phi = diag ? CPMap(VectorTuple(rng.gaussian(p, n))) : CPMap(random_kraus(p, n, 3, rng));
    const SymMatrix z(random_sym(p, rng));
    const SymMatrix w(random_sym(n, rng));
    const double lhs = apply(phi, z).dot(w);
    const double rhs = z.dot(apply_dual(phi, w));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("size examples") {
  Rng rng(23);
  CHECK(size(CPMap(testutil::unit_tuple(4, 3, rng))) == doctest::Approx(3));
  CHECK(size(CPMap(tuple_of({{2}}))) == doctest::Approx(4));
  const auto ops = random_kraus(3, 4, 5, rng);
  double fro = 0;
  for (const auto& a : ops) fro += a.squaredNorm();
  CHECK(size(CPMap(ops)) == doctest::Approx(fro).epsilon(1e-12));
}

TEST_CASE("balancedness examples") {
  const Balancedness b0 = balancedness(CPMap(tuple_of({{1, 0}, {0, 1}})));
  CHECK(b0.eps == doctest::Approx(0).epsilon(1e-15));
  const Balancedness b1 = balancedness(CPMap(tuple_of({{1, 0}, {1, 0}, {0, 1}})));
  CHECK(b1.left == doctest::Approx(0).epsilon(1e-15));
  CHECK(b1.right == doctest::Approx(1.0 / 3));
  CHECK(b1.eps == doctest::Approx(1.0 / 3));
  Rng rng(24);
  CHECK(balancedness(CPMap(testutil::unit_tuple(5, 5000, rng))).eps <= 0.2);
}

TEST_CASE("eps of orthonormal multiples is zero") {
  for (Index p = 1; p <= 5; ++p) {
    for (Index m : {1, 2, 3}) {
      Matrix v(p, p * m);
      for (Index c = 0; c < m; ++c) v.middleCols(c * p, p) = Matrix::Identity(p, p);
      CHECK(balancedness(CPMap(VectorTuple(v))).eps <= 1e-10);
    }
  }
}

TEST_CASE("scale") {
  const CPMap basis(tuple_of({{1, 0}, {0, 1}}));
  Matrix l = Matrix::Identity(2, 2);
  l(0, 0) = 2;
  const CPMap s = scale(basis, {l, Matrix::Identity(2, 2)});
  CHECK(s.vectors().vector(0)(0) == doctest::Approx(2));
  CHECK(s.vectors().vector(1)(1) == doctest::Approx(1));
  CHECK(size(s) == doctest::Approx(5));
  CHECK_THROWS_AS(scale(basis, {Matrix::Zero(2, 2), Matrix::Identity(2, 2)}), Error);
  Matrix full = Matrix::Ones(2, 2);
  full(0, 1) = 0.5;
  CHECK_THROWS_AS(scale(basis, {Matrix::Identity(2, 2), full}), Error);
}

TEST_CASE("scaling identities and dual scaling") {
  Rng rng(25);
  for (int t = 0; t < 10; ++t) {
    const Index p = 3, n = 6;
    const Matrix l = rng.gaussian(p, p) + 3 * Matrix::Identity(p, p);
    Vector rd(n);
    for (Index i = 0; i < n; ++i) rd(i) = 0.5 + rng.uniform();
    const Matrix r = rd.asDiagonal();
    const CPMap phi(VectorTuple(rng.gaussian(p, n)));
    const CPMap s = scale(phi, {l, r});
    const Matrix z = random_sym(p, rng);
    const Matrix w = random_sym(n, rng);
    // Phi_{L,R}(Z) = R Phi(L^T Z L) R^T
    const Matrix expect = r * apply(phi, SymMatrix(l.transpose() * z * l)).matrix() * r.transpose();
    CHECK((apply(s, SymMatrix(z)).matrix() - expect).norm() <= 1e-10 * expect.norm());
    // (Phi_{L,R})^*(W) = L Phi^*(R^T W R) L^T, the dual scaled by (R, L).
    const Matrix dual_expect = l * apply_dual(phi, SymMatrix(r.transpose() * w * r)).matrix() * l.transpose();
    CHECK((apply_dual(s, SymMatrix(w)).matrix() - dual_expect).norm() <= 1e-10 * (1 + dual_expect.norm()));

    const auto ops = random_kraus(p, 4, 3, rng);
    const Matrix rk = rng.gaussian(4, 4) + 3 * Matrix::Identity(4, 4);
    const CPMap k = scale(CPMap(ops), {l, rk});
    const Matrix ek = rk * oracle_apply_kraus(ops, l.transpose() * z * l) * rk.transpose();
    CHECK((apply(k, SymMatrix(z)).matrix() - ek).norm() <= 1e-10 * ek.norm());
  }
}

TEST_CASE("size under near-identity scaling") {
  Rng rng(26);
  for (int t = 0; t < 50; ++t) {
    const Index p = 4, n = 9;
    const CPMap phi(testutil::unit_tuple(p, n, rng));
    const Matrix l = random_pd(p, rng, 0.01);
    Vector rd(n);
    for (Index i = 0; i < n; ++i) rd(i) = std::exp(0.01 * rng.normal());
    const Matrix r = rd.asDiagonal();
    const double dl = sym_op_norm(l.transpose() * l - Matrix::Identity(p, p));
    const double dr = sym_op_norm(r.transpose() * r - Matrix::Identity(n, n));
    const double delta = std::max(dl, dr);
    const double s = size(phi);
    const double s2 = size(scale(phi, {l, r}));
    CHECK((1 - delta) * (1 - delta) * s <= s2 + 1e-12);
    CHECK(s2 <= (1 + delta) * (1 + delta) * s + 1e-12);
  }
}

TEST_CASE("positivity") {
  Rng rng(27);
  for (int t = 0; t < 20; ++t) {
    const CPMap phi = t % 2 ? CPMap(VectorTuple(rng.gaussian(3, 5))) : CPMap(random_kraus(3, 4, 2, rng));
    const Matrix g = rng.gaussian(3, 2);
    const Matrix psd = g * g.transpose();
    const Matrix out = apply(phi, SymMatrix(psd)).matrix();
    CHECK(sym_eigenvalues(out).minCoeff() >= -1e-10 * (1 + out.norm()));
  }
}

TEST_CASE("symmetric coordinates") {
  Rng rng(28);
  const Matrix s = random_sym(4, rng);
  const Vector c = sym_to_coords(s);
  CHECK(c.size() == 10);
  CHECK(c.norm() == doctest::Approx(s.norm()).epsilon(1e-12));
  CHECK((coords_to_sym(c, 4) - s).norm() < 1e-14);
  Matrix e = Matrix::Zero(3, 3);
  e(0, 1) = e(1, 0) = 1 / std::sqrt(2.0);
  const Vector ce = sym_to_coords(e);
  CHECK(ce(1) == doctest::Approx(1));
  CHECK(sym_diagonal_coords(3) == std::vector<Index>{0, 3, 5});
}

TEST_CASE("as_matrix") {
  const Matrix basis = as_matrix(CPMap(tuple_of({{1, 0}, {0, 1}})));
  CHECK(basis.rows() == 2);
  CHECK(basis.cols() == 3);
  CHECK(op_norm(basis) == doctest::Approx(1));
  const Matrix one = as_matrix(CPMap(tuple_of({{2}, {-1}, {3}})));
  CHECK(one.rows() == 3);
  CHECK(one.cols() == 1);
  CHECK(one(0, 0) == doctest::Approx(4));
  CHECK(one(1, 0) == doctest::Approx(1));
  CHECK(one(2, 0) == doctest::Approx(9));

  Rng rng(29);
  for (int t = 0; t < 5; ++t) {
    const Matrix v = rng.gaussian(3, 6);
    const Matrix z = random_sym(3, rng);
    const Vector got = as_matrix(CPMap(VectorTuple(v))) * sym_to_coords(z);
    CHECK((got - oracle_apply_vectors(v, z).diagonal()).norm() <= 1e-10);
    const auto ops = random_kraus(3, 4, 2, rng);
    const Vector gk = as_matrix(CPMap(ops)) * sym_to_coords(z);
    CHECK((gk - sym_to_coords(oracle_apply_kraus(ops, z))).norm() <= 1e-10);
  }
}

TEST_CASE("budget refusal names the dimension") {
  Rng rng(30);
  std::vector<Matrix> ops{rng.gaussian(2, 100)};
  try {
    check_budget(CPMap(ops), {});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BudgetExceeded);
    CHECK(std::string(e.what()).find("p = 100") != std::string::npos);
  }
  SpectralBudget small;
  small.max_n_diagonal = 5;
  CHECK_THROWS_AS(as_matrix(CPMap(VectorTuple(rng.gaussian(2, 6))), small), Error);
}
