#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "opscale/linalg.hpp"

namespace opscale {

/// Seeded generator. Every purpose gets its own stream: the engine is seeded
/// from (seed, stream ids...) through std::seed_seq, so results depend only on
/// those words and never on scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {});

  std::mt19937_64& engine() { return engine_; }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  Vector gaussian(Index n);
  Matrix gaussian(Index rows, Index cols);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Haar-random orthogonal matrix (QR of a Gaussian matrix with sign fix).
Matrix haar_orthogonal(Index p, Rng& rng);

/// Orthogonal projection onto a Haar-random rank-r subspace of R^p.
Matrix haar_projection(Index p, Index r, Rng& rng);

}  // namespace opscale
