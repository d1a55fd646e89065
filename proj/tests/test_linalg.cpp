#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "helpers.hpp"
#include "opscale/linalg.hpp"

using namespace opscale;
using testutil::random_pd;
using testutil::random_sym;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

// ||I - A^{1/2} B^{-1} A^{1/2}|| computed literally.
Vector literal_deviation(const Matrix& a, const Matrix& b) {
  const Matrix ra = a.sqrt();
  const Matrix m = ra * b.inverse() * ra;
  const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  return (1.0 - es.eigenvalues().array()).matrix();
}

}  // namespace

TEST_CASE("SymMatrix construction") {
  Matrix m(2, 2);
  m << 1, 2, 2, 3;
  SymMatrix s(m);
  CHECK(s.trace() == doctest::Approx(4));
  CHECK_FALSE(s.is_traceless());
  CHECK(SymMatrix::diagonal(Vector::Ones(2) * 3).trace() == doctest::Approx(6));
  Matrix bad(2, 2);
  bad << 1, 2, 0, 1;
  CHECK_THROWS_AS(SymMatrix{bad}, Error);
  CHECK_THROWS_AS(SymMatrix{Matrix(2, 3)}, Error);
  Matrix tl = diag2(1, -1);
  CHECK(SymMatrix(tl).is_traceless());
}

TEST_CASE("PDMatrix rejects non-PD input and checks tags") {
  try {
    PDMatrix bad(diag2(1, 0));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotPositiveDefinite);
  }
  CHECK_THROWS_AS(PDMatrix(diag2(1, -1)), Error);
  CHECK_THROWS_AS(PDMatrix(diag2(1, 2), Normalization::trace_p), Error);
  CHECK_NOTHROW(PDMatrix(diag2(1.5, 0.5), Normalization::trace_p));
  CHECK_NOTHROW(PDMatrix(diag2(2, 0.5), Normalization::det_1));
  CHECK(PDMatrix::identity(3).normalization() == Normalization::det_1);
}

TEST_CASE("mat_sqrt") {
  CHECK((mat_sqrt(PDMatrix::identity(3)).matrix() - Matrix::Identity(3, 3)).norm() < 1e-14);
  CHECK((mat_sqrt(PDMatrix(diag2(4, 9))).matrix() - diag2(2, 3)).norm() < 1e-14);
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const Matrix a = random_pd(5, rng, 1.0);
    const Matrix r = mat_sqrt(PDMatrix(a)).matrix();
    CHECK((r * r - a).norm() / a.norm() <= 1e-10);
    // Independent oracle: Eigen's Schur-based matrix square root.
    CHECK((r - a.sqrt()).norm() / r.norm() <= 1e-10);
  }
}

TEST_CASE("error_op and error_frob examples") {
  const PDMatrix i2 = PDMatrix::identity(2);
  CHECK(error_op(i2, i2) == doctest::Approx(0).epsilon(1e-15));
  CHECK(error_frob(i2, i2) == doctest::Approx(0).epsilon(1e-15));
  CHECK(error_op(PDMatrix(2 * Matrix::Identity(2, 2)), i2) == doctest::Approx(1));
  CHECK(error_frob(PDMatrix(2 * Matrix::Identity(2, 2)), i2) == doctest::Approx(std::sqrt(2.0)));
  CHECK(error_op(PDMatrix(diag2(1, 1)), PDMatrix(diag2(2, 1))) == doctest::Approx(0.5));
}

TEST_CASE("error metrics agree with the literal definition") {
  Rng rng(12);
  for (int t = 0; t < 30; ++t) {
    const Index p = 2 + t % 5;
    const Matrix a = random_pd(p, rng);
    const Matrix b = random_pd(p, rng);
    const Vector dev = literal_deviation(a, b);
    const double op = error_op(PDMatrix(a), PDMatrix(b));
    const double fr = error_frob(PDMatrix(a), PDMatrix(b));
    CHECK(op == doctest::Approx(dev.cwiseAbs().maxCoeff()).epsilon(1e-9));
    CHECK(fr == doctest::Approx(dev.norm()).epsilon(1e-9));
    CHECK(fr >= op - 1e-12);
    CHECK(fr <= std::sqrt(static_cast<double>(p)) * op + 1e-12);
  }
}

TEST_CASE("normalize examples") {
  const PDMatrix a = normalize(PDMatrix(3 * Matrix::Identity(2, 2)), Normalization::trace_p);
  CHECK((a.matrix() - Matrix::Identity(2, 2)).norm() < 1e-14);
  CHECK(a.normalization() == Normalization::trace_p);
  CHECK((normalize(PDMatrix(diag2(2, 0.5)), Normalization::det_1).matrix() - diag2(2, 0.5)).norm() < 1e-14);
  CHECK((normalize(PDMatrix(diag2(4, 1)), Normalization::det_1).matrix() - diag2(2, 0.5)).norm() < 1e-14);
}

TEST_CASE("geodesic_point") {
  Rng rng(13);
  const SymMatrix x(diag2(1, -1));
  CHECK((geodesic_point(PDMatrix::identity(2), x, 0.0).matrix() - Matrix::Identity(2, 2)).norm() < 1e-14);
  CHECK((geodesic_point(PDMatrix::identity(2), x, 0.7).matrix() - diag2(std::exp(0.7), std::exp(-0.7))).norm() <
        1e-13);
  for (int t = 0; t < 10; ++t) {
    const Matrix z = random_pd(4, rng);
    const Matrix xs = random_sym(4, rng);
    const double step = 0.3 * rng.normal();
    // Oracle: G G^T with G = sqrt(Z) exp(tX/2), using Eigen's dense exponential.
    const Matrix g = z.sqrt() * (0.5 * step * xs).exp();
    const Matrix expected = g * g.transpose();
    const Matrix got = geodesic_point(PDMatrix(z), SymMatrix(xs), step).matrix();
    CHECK((got - expected).norm() / expected.norm() <= 1e-10);
  }
}

TEST_CASE("sym_exp and sym_log are inverse") {
  Rng rng(14);
  const Matrix s = random_sym(5, rng);
  CHECK((sym_log(sym_exp(s)) - s).norm() <= 1e-10);
  CHECK((sym_exp(s) - s.exp()).norm() / s.exp().norm() <= 1e-10);
  CHECK(log_det_pd(sym_exp(s)) == doctest::Approx(s.trace()).epsilon(1e-10));
}

TEST_CASE("approximate triangle inequality, near-symmetry and inversion stability") {
  Rng rng(15);
  int checked = 0;
  for (int t = 0; t < 400; ++t) {
    const Index p = 2 + t % 6;
    const Matrix a = random_pd(p, rng, 1.0);
    auto perturb = [&](const Matrix& m) {
      const Matrix h = 0.02 * random_sym(p, rng) / std::sqrt(static_cast<double>(p));
      const Matrix r = m.sqrt();
      const Matrix out = r * sym_exp(h) * r;
      return Matrix(0.5 * (out + out.transpose()));
    };
    const Matrix b = perturb(a);
    const Matrix c = perturb(b);
    const PDMatrix A(a), B(b), C(c);
    const double ab = error_op(A, B);
    const double bc = error_op(B, C);
    if (ab > 0.05 || bc > 0.05) continue;
    ++checked;
    CHECK(error_op(A, C) <= 3 * (ab + bc));
    CHECK(error_op(B, A) <= 3 * ab);
    CHECK(error_op(PDMatrix(pd_inverse(a)), PDMatrix(pd_inverse(b))) <= 3 * ab);

    const PDMatrix a1 = normalize(A, Normalization::det_1);
    const PDMatrix b1 = normalize(B, Normalization::det_1);
    const double d1 = error_op(a1, b1);
    if (d1 <= 0.05) {
      CHECK(error_op(normalize(A, Normalization::trace_p), normalize(B, Normalization::trace_p)) <= 5 * d1);
    }
  }
  CHECK(checked > 100);
}
