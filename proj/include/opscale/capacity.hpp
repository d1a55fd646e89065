#pragma once

#include <cstdint>

#include "opscale/cpmap.hpp"

namespace opscale {

/// f(Z) = (p/n) log det Phi(Z) - log det Z. Invariant under Z -> aZ.
/// Throws SingularImage when Phi(Z) has an eigenvalue <= 1e-300.
double f_value(const CPMap& phi, const PDMatrix& z);

/// Geodesic gradient (p/n) sqrt(Z) Phi*(Phi(Z)^{-1}) sqrt(Z) - I_p.
SymMatrix geodesic_gradient(const CPMap& phi, const PDMatrix& z);

/// d^2/dt^2 f(sqrt(Z) e^{tX} sqrt(Z)) at t = 0, through the closed form for
/// log det Psi(e^{tX}) with Psi = Phi_{sqrt Z, I}.
double second_directional(const CPMap& phi, const PDMatrix& z, const SymMatrix& x);

struct ConvexityCertificate {
  /// Smallest sampled curvature of X -> log det Phi(e^{tX}) at t = 0,
  /// divided by ||X||_F^2. Equals (n/p) * second_directional / ||X||_F^2.
  double sampled_min = 0.0;
  /// (n/p)((1+eps)^{-1}(1-eps) - (1-lambda)^2 (1-eps)^{-1}) with the measured
  /// eps and lambda of phi.
  double analytic_bound = 0.0;
  double eps = 0.0;
  double lambda = 0.0;
  bool holds = true;  // sampled_min >= analytic_bound - 1e-8
};

/// Samples `trials` random traceless directions at the identity. For p = 1
/// the traceless space is empty and sampled_min is +inf.
ConvexityCertificate strong_convexity_certificate(const CPMap& phi, int trials, std::uint64_t seed = 0);

/// Value of f and its gradient sharing one evaluation of Phi(Z). Used by the
/// Sinkhorn engine, which works with unvalidated iterates.
struct CapacityEval {
  double f = 0.0;
  Matrix gradient;
  Matrix dual_image;  // Phi*(Phi(Z)^{-1})
};

CapacityEval evaluate(const CPMap& phi, const Matrix& z);

}  // namespace opscale
