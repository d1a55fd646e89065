#include "opscale/sinkhorn.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace opscale {

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Converged: return "Converged";
    case RunStatus::MaxIters: return "MaxIters";
    case RunStatus::Diverged: return "Diverged";
  }
  return "Unknown";
}

namespace {

// Inverse of (p/n) Phi*(Phi(Z)^{-1}) given the dual image from evaluate().
Matrix next_iterate(const CPMap& phi, const Matrix& dual_image) {
  const double pn = static_cast<double>(phi.in_dim()) / static_cast<double>(phi.out_dim());
  const Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(pn * dual_image));
  const Vector& ev = es.eigenvalues();
  if (!(ev.minCoeff() > 1e-300 * std::max(1.0, ev.maxCoeff()))) {
    throw Error(Errc::SingularImage, "Phi*(Phi(Z)^{-1}) is singular");
  }
  return symmetrize(es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose());
}

struct Normalized {
  Matrix z;
  double condition = 0.0;
};

Normalized normalize_det1(const Matrix& z) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(z);
  const Vector& ev = es.eigenvalues();
  if (!(ev.minCoeff() > 0.0)) return {z, std::numeric_limits<double>::infinity()};
  const double shift = std::exp(-ev.array().log().sum() / static_cast<double>(z.rows()));
  return {symmetrize(z * shift), ev.maxCoeff() / ev.minCoeff()};
}

double geodesic_step(const Matrix& prev, const Matrix& next) {
  const Matrix root_inv = pd_inverse_sqrt(prev);
  const Vector ev = sym_eigenvalues(symmetrize(root_inv * next * root_inv));
  return ev.array().log().matrix().norm();
}

}  // namespace

PDMatrix step(const CPMap& phi, const PDMatrix& z) {
  const CapacityEval eval = evaluate(phi, z.matrix());
  Matrix next = next_iterate(phi, eval.dual_image);
  try {
    return PDMatrix(std::move(next));
  } catch (const Error& e) {
    throw Error(Errc::SingularImage, std::string("Sinkhorn step left the PD cone: ") + e.what());
  }
}

SinkhornResult run(const CPMap& phi, const PDMatrix& z0, const SinkhornOptions& options) {
  if (!(options.tol > 0.0)) throw Error(Errc::InvalidArgument, "tol must be positive");
  if (options.max_iters < 0) throw Error(Errc::InvalidArgument, "max_iters must be nonnegative");
  if (z0.dim() != phi.in_dim()) throw Error(Errc::DimMismatch, "starting point has the wrong size");

  ConvergenceTrace trace;
  Matrix z = z0.matrix();
  std::optional<Matrix> prev;
  PDMatrix best = normalize(z0, Normalization::det_1);

  for (Index t = 0;; ++t) {
    const Normalized zn = normalize_det1(z);
    if (!(zn.condition <= options.max_condition)) {
      trace.status = RunStatus::Diverged;
      trace.reason = "iterate condition number exceeded " + std::to_string(options.max_condition);
      break;
    }
    CapacityEval eval;
    try {
      eval = evaluate(phi, z);
    } catch (const Error& e) {
      trace.status = RunStatus::Diverged;
      trace.reason = e.what();
      break;
    }
    TraceRecord rec;
    rec.iter = t;
    rec.f = eval.f;
    rec.grad_norm = eval.gradient.norm();
    rec.step_dist = prev ? geodesic_step(*prev, zn.z) : 0.0;
    trace.records.push_back(rec);
    // Ill-conditioned iterates lose the det-1 tag to eigensolver roundoff;
    // the result keeps the last one that still carries it.
    if (zn.condition <= 1e11) {
      try {
        best = PDMatrix(zn.z, Normalization::det_1);
      } catch (const Error&) {
      }
    }
    prev = zn.z;

    if (rec.grad_norm <= options.tol) {
      trace.status = RunStatus::Converged;
      break;
    }
    if (t >= options.max_iters) {
      trace.status = RunStatus::MaxIters;
      break;
    }
    try {
      z = next_iterate(phi, eval.dual_image);
    } catch (const Error& e) {
      trace.status = RunStatus::Diverged;
      trace.reason = e.what();
      break;
    }
  }
  return SinkhornResult{std::move(best), std::move(trace)};
}

bool verify_progress(const ConvergenceTrace& trace) {
  const auto& r = trace.records;
  for (std::size_t t = 0; t + 1 < r.size(); ++t) {
    if (r[t + 1].f > r[t].f + 1e-9) return false;
    const double g = r[t].grad_norm;
    if (g <= 1.0 && r[t + 1].f > r[t].f - g * g / 6.0 + 1e-9) return false;
  }
  return true;
}

RateEstimate linear_rate_estimate(const ConvergenceTrace& trace, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw Error(Errc::InvalidArgument, "tail_fraction must lie in (0, 1]");
  }
  std::vector<const TraceRecord*> usable;
  for (const auto& rec : trace.records) {
    if (rec.grad_norm > 0.0) usable.push_back(&rec);
  }
  const auto take = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(usable.size())));
  if (take < 10) {
    throw Error(Errc::InsufficientData, "need at least 10 tail points, have " + std::to_string(take));
  }
  const std::size_t first = usable.size() - take;
  const auto m = static_cast<double>(take);
  double sx = 0.0, sy = 0.0;
  for (std::size_t k = first; k < usable.size(); ++k) {
    sx += static_cast<double>(usable[k]->iter);
    sy += std::log(usable[k]->grad_norm);
  }
  const double mx = sx / m;
  const double my = sy / m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = first; k < usable.size(); ++k) {
    const double dx = static_cast<double>(usable[k]->iter) - mx;
    const double dy = std::log(usable[k]->grad_norm) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  RateEstimate est;
  est.points = static_cast<Index>(take);
  est.slope = sxy / sxx;
  // A constant sequence is fitted exactly by the zero slope.
  est.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return est;
}

}  // namespace opscale
