#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "opscale/cpmap.hpp"
#include "opscale/random.hpp"

namespace opscale {

/// Radial law of the elliptical model u * Sigma^{1/2} * V.
namespace radial {
struct Constant {};
struct LogNormal {
  double s = 1.0;  // u = exp(s g), g standard normal
};
struct Pareto {
  double a = 1.0;  // u = U^{-1/a}, tail index a
};
struct CauchyLike {};  // u = |t|, t standard Cauchy
}  // namespace radial

using RadialLaw = std::variant<radial::Constant, radial::LogNormal, radial::Pareto, radial::CauchyLike>;

/// Parses "const", "lognormal:s", "pareto:a" or "cauchy".
RadialLaw parse_radial_law(const std::string& text);
std::string to_string(const RadialLaw& law);

struct EllipticalSpec {
  Index p = 1;
  PDMatrix shape = PDMatrix::identity(1);  // trace_p normalized on use
  RadialLaw u_dist = radial::Constant{};
  std::uint64_t seed = 0;
};

/// Uniform point on S^{p-1}: a normalized standard Gaussian vector.
Vector haar_unit(Index p, Rng& rng);

/// n Haar unit vectors as a tuple.
VectorTuple haar_tuple(Index p, Index n, Rng& rng);

/// n i.i.d. draws u * Sigma^{1/2} * v, Sigma the trace_p normalized shape.
/// Reproducible from spec.seed.
VectorTuple sample_elliptical(const EllipticalSpec& spec, Index n);

/// Rounds entry (j, i) to the nearest multiple of 2^{-bits[i]}, ties to even.
/// Throws RoundedToZero if a whole sample rounds to zero.
VectorTuple round_bits(const VectorTuple& x, const std::vector<int>& bits);

/// j-th raw moment of X_k = v_1^2 + ... + v_k^2 for Haar v in R^p, i.e. of
/// Beta(k/2, (p-k)/2).
double coordinate_mass_moment(Index p, Index k, int j);

/// ||(p/n) sum v_i v_i^T - I_p||_op.
double covariance_concentration(const VectorTuple& v);

}  // namespace opscale
