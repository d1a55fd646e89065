#pragma once

#include <string>
#include <vector>

#include "opscale/capacity.hpp"

namespace opscale {

enum class RunStatus { Converged, MaxIters, Diverged };

std::string_view to_string(RunStatus status);

struct TraceRecord {
  Index iter = 0;
  double f = 0.0;
  double grad_norm = 0.0;  // ||grad f(Z_t)||_F
  double step_dist = 0.0;  // ||log(Z_{t-1}^{-1/2} Z_t Z_{t-1}^{-1/2})||_F on det-1 iterates
};

struct ConvergenceTrace {
  std::vector<TraceRecord> records;
  RunStatus status = RunStatus::MaxIters;
  std::string reason;  // why a Diverged run stopped

  Index iterations() const { return records.empty() ? 0 : records.back().iter; }
  double final_grad_norm() const { return records.empty() ? 0.0 : records.back().grad_norm; }
};

/// One Sinkhorn update: the inverse of (p/n) Phi*(Phi(Z)^{-1}).
/// Throws SingularImage when Phi(Z) or the dual image is numerically singular.
PDMatrix step(const CPMap& phi, const PDMatrix& z);

struct SinkhornOptions {
  double tol = 1e-8;
  int max_iters = 10000;
  double max_condition = 1e14;
};

struct SinkhornResult {
  /// Final det-1 iterate; for Diverged runs the last iterate that was still
  /// safely positive definite.
  PDMatrix iterate;
  ConvergenceTrace trace;
};

/// Iterates `step` from z0 until ||grad f|| <= tol (Converged), the iterate's
/// condition number exceeds max_condition or Phi(Z) turns singular
/// (Diverged), or max_iters steps were taken (MaxIters). Never throws for
/// trajectory failures.
SinkhornResult run(const CPMap& phi, const PDMatrix& z0, const SinkhornOptions& options = {});

/// True iff f never increases (up to 1e-9) and every step taken from a point
/// with ||grad f|| <= 1 decreases f by at least ||grad f||^2 / 6 - 1e-9.
bool verify_progress(const ConvergenceTrace& trace);

struct RateEstimate {
  double slope = 0.0;  // of log ||grad f|| against iteration
  double r2 = 0.0;
  Index points = 0;
};

/// Least-squares fit of log grad_norm over the last tail_fraction of the
/// records with positive gradient norm. InsufficientData below 10 points.
RateEstimate linear_rate_estimate(const ConvergenceTrace& trace, double tail_fraction = 0.5);

}  // namespace opscale
