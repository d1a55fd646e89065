#include "opscale/capacity.hpp"

#include <cmath>
#include <limits>

#include "opscale/expander.hpp"
#include "opscale/random.hpp"

namespace opscale {

namespace {

constexpr double kSingularImage = 1e-300;

double ratio_pn(const CPMap& phi) {
  return static_cast<double>(phi.in_dim()) / static_cast<double>(phi.out_dim());
}

}  // namespace

CapacityEval evaluate(const CPMap& phi, const Matrix& z) {
  if (z.rows() != phi.in_dim() || z.cols() != phi.in_dim()) {
    throw Error(Errc::DimMismatch, "capacity evaluated at a matrix of the wrong size");
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> ez(z);
  if (!(ez.eigenvalues().minCoeff() > 0.0)) throw Error(Errc::NotPositiveDefinite, "capacity needs Z > 0");
  const Matrix root = symmetrize(ez.eigenvectors() * ez.eigenvalues().cwiseSqrt().asDiagonal() *
                                 ez.eigenvectors().transpose());
  const double log_det_z = ez.eigenvalues().array().log().sum();
  const double pn = ratio_pn(phi);

  CapacityEval out;
  double log_det_image = 0.0;
  if (phi.is_diagonal_output()) {
    const Vector image = phi.apply_diagonal(z);
    if (!(image.minCoeff() > kSingularImage)) {
      throw Error(Errc::SingularImage, "Phi(Z) has a vanishing diagonal entry");
    }
    log_det_image = image.array().log().sum();
    out.dual_image = phi.apply_dual_diagonal(image.cwiseInverse());
  } else {
    const Matrix image = apply(phi, SymMatrix(z)).matrix();
    const Eigen::SelfAdjointEigenSolver<Matrix> ei(image);
    if (!(ei.eigenvalues().minCoeff() > kSingularImage)) {
      throw Error(Errc::SingularImage, "Phi(Z) is singular");
    }
    log_det_image = ei.eigenvalues().array().log().sum();
    const Matrix inv = symmetrize(ei.eigenvectors() * ei.eigenvalues().cwiseInverse().asDiagonal() *
                                  ei.eigenvectors().transpose());
    out.dual_image = apply_dual(phi, SymMatrix(inv)).matrix();
  }
  out.f = pn * log_det_image - log_det_z;
  out.gradient = symmetrize(pn * root * out.dual_image * root) - Matrix::Identity(z.rows(), z.cols());
  return out;
}

double f_value(const CPMap& phi, const PDMatrix& z) { return evaluate(phi, z.matrix()).f; }

SymMatrix geodesic_gradient(const CPMap& phi, const PDMatrix& z) {
  return SymMatrix(evaluate(phi, z.matrix()).gradient);
}

double second_directional(const CPMap& phi, const PDMatrix& z, const SymMatrix& x) {
  if (x.dim() != phi.in_dim() || z.dim() != phi.in_dim()) {
    throw Error(Errc::DimMismatch, "second_directional: direction or base point has the wrong size");
  }
  const Matrix root = mat_sqrt(z).matrix();
  const Matrix& xm = x.matrix();
  const Matrix x2 = xm * xm;
  double curvature = 0.0;  // of t -> log det Psi(e^{tX}), Psi = Phi_{sqrt Z, I}
  if (phi.is_diagonal_output()) {
    const Matrix u = root * phi.vectors().columns();
    const Vector w = u.colwise().squaredNorm().transpose();
    if (!(w.minCoeff() > kSingularImage)) throw Error(Errc::SingularImage, "Phi(Z) has a vanishing diagonal entry");
    const Vector first = u.cwiseProduct(xm * u).colwise().sum().transpose();
    const Vector second = u.cwiseProduct(x2 * u).colwise().sum().transpose();
    curvature = (second.array() / w.array() - (first.array() / w.array()).square()).sum();
  } else {
    const CPMap psi = scale(phi, {root, Matrix::Identity(phi.out_dim(), phi.out_dim())});
    const Matrix at_identity = apply(psi, SymMatrix::identity(phi.in_dim())).matrix();
    const Eigen::SelfAdjointEigenSolver<Matrix> ei(at_identity);
    if (!(ei.eigenvalues().minCoeff() > kSingularImage)) throw Error(Errc::SingularImage, "Phi(Z) is singular");
    const Matrix inv = symmetrize(ei.eigenvectors() * ei.eigenvalues().cwiseInverse().asDiagonal() *
                                  ei.eigenvectors().transpose());
    const Matrix px = apply(psi, x).matrix();
    const Matrix px2 = apply(psi, SymMatrix(symmetrize(x2))).matrix();
    const Matrix t = inv * px;
    curvature = (inv * px2).trace() - (t * t).trace();
  }
  return ratio_pn(phi) * curvature;
}

ConvexityCertificate strong_convexity_certificate(const CPMap& phi, int trials, std::uint64_t seed) {
  if (trials < 1) throw Error(Errc::InvalidArgument, "certificate needs at least one trial");
  const ExpansionReport rep = expansion_constant(phi);
  ConvexityCertificate cert;
  cert.eps = rep.eps;
  cert.lambda = rep.lambda;
  const Index p = phi.in_dim();
  const double np_ratio = 1.0 / ratio_pn(phi);
  cert.analytic_bound = np_ratio * ((1.0 - rep.eps) / (1.0 + rep.eps) -
                                    (1.0 - rep.lambda) * (1.0 - rep.lambda) / (1.0 - rep.eps));
  if (p == 1) {
    cert.sampled_min = std::numeric_limits<double>::infinity();
    return cert;
  }
  Rng rng(seed, {0x636f6e766578ULL});
  const PDMatrix identity = PDMatrix::identity(p);
  cert.sampled_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < trials; ++k) {
    Matrix g = symmetrize(rng.gaussian(p, p));
    g -= (g.trace() / static_cast<double>(p)) * Matrix::Identity(p, p);
    g /= g.norm();
    const double value = np_ratio * second_directional(phi, identity, SymMatrix(g));
    cert.sampled_min = std::min(cert.sampled_min, value);
  }
  cert.holds = cert.sampled_min >= cert.analytic_bound - 1e-8;
  return cert;
}

}  // namespace opscale
