#pragma once

#include <cmath>
#include <vector>

#include "opscale/cpmap.hpp"
#include "opscale/random.hpp"

namespace testutil {

using opscale::Index;
using opscale::Matrix;
using opscale::Vector;

inline Matrix random_sym(Index p, opscale::Rng& rng) {
  const Matrix g = rng.gaussian(p, p);
  return 0.5 * (g + g.transpose());
}

inline Matrix random_traceless(Index p, opscale::Rng& rng) {
  Matrix x = random_sym(p, rng);
  x -= (x.trace() / static_cast<double>(p)) * Matrix::Identity(p, p);
  return x;
}

// Q diag(exp(spread * g)) Q^T with Gaussian g.
inline Matrix random_pd(Index p, opscale::Rng& rng, double spread = 0.5) {
  const Matrix q = opscale::haar_orthogonal(p, rng);
  Vector d(p);
  for (Index i = 0; i < p; ++i) d(i) = std::exp(spread * rng.normal());
  const Matrix m = q * d.asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

inline opscale::VectorTuple gaussian_tuple(Index p, Index n, opscale::Rng& rng) {
  return opscale::VectorTuple(rng.gaussian(p, n));
}

inline opscale::VectorTuple unit_tuple(Index p, Index n, opscale::Rng& rng) {
  Matrix g = rng.gaussian(p, n);
  g.colwise().normalize();
  return opscale::VectorTuple(g);
}

// Columns from a list of coordinate vectors given as rows.
inline opscale::VectorTuple tuple_of(std::initializer_list<std::initializer_list<double>> rows) {
  const Index n = static_cast<Index>(rows.size());
  const Index p = static_cast<Index>(rows.begin()->size());
  Matrix m(p, n);
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) m(j++, i) = v;
    ++i;
  }
  return opscale::VectorTuple(m);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace testutil
