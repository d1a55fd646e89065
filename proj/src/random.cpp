#include "opscale/random.hpp"

namespace opscale {

Rng::Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * stream.size());
  auto push = [&](std::uint64_t w) {
    words.push_back(static_cast<std::uint32_t>(w & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(w >> 32));
  };
  push(seed);
  for (auto s : stream) push(s);
  std::seed_seq seq(words.begin(), words.end());
  engine_.seed(seq);
}

Vector Rng::gaussian(Index n) {
  Vector g(n);
  for (Index i = 0; i < n; ++i) g(i) = normal();
  return g;
}

Matrix Rng::gaussian(Index rows, Index cols) {
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = normal();
  return g;
}

Matrix haar_orthogonal(Index p, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(rng.gaussian(p, p));
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < p; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  return q;
}

Matrix haar_projection(Index p, Index r, Rng& rng) {
  if (r == 0) return Matrix::Zero(p, p);
  Eigen::HouseholderQR<Matrix> qr(rng.gaussian(p, r));
  const Matrix q = Matrix(qr.householderQ()).leftCols(r);
  return symmetrize(q * q.transpose());
}

}  // namespace opscale
