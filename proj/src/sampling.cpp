#include "opscale/sampling.hpp"

#include <cfenv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace opscale {

namespace {

constexpr std::uint64_t kStreamElliptical = 0x656c6c6970ULL;

double parse_param(const std::string& text, std::size_t colon) {
  try {
    std::size_t used = 0;
    const std::string tail = text.substr(colon + 1);
    const double v = std::stod(tail, &used);
    if (used != tail.size()) throw std::invalid_argument(tail);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::InvalidArgument, "bad radial law parameter in '" + text + "'");
  }
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

RadialLaw parse_radial_law(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  if (head == "const" && colon == std::string::npos) return radial::Constant{};
  if (head == "cauchy" && colon == std::string::npos) return radial::CauchyLike{};
  if (head == "lognormal" && colon != std::string::npos) {
    const double s = parse_param(text, colon);
    if (!(s >= 0.0)) throw Error(Errc::InvalidArgument, "lognormal scale must be nonnegative");
    return radial::LogNormal{s};
  }
  if (head == "pareto" && colon != std::string::npos) {
    const double a = parse_param(text, colon);
    if (!(a > 0.0)) throw Error(Errc::InvalidArgument, "pareto index must be positive");
    return radial::Pareto{a};
  }
  throw Error(Errc::InvalidArgument, "unknown radial law '" + text + "' (const, lognormal:s, pareto:a, cauchy)");
}

std::string to_string(const RadialLaw& law) {
  return std::visit(overloaded{
                        [](const radial::Constant&) { return std::string("const"); },
                        [](const radial::LogNormal& l) {
                          std::ostringstream os;
                          os << "lognormal:" << l.s;
                          return os.str();
                        },
                        [](const radial::Pareto& l) {
                          std::ostringstream os;
                          os << "pareto:" << l.a;
                          return os.str();
                        },
                        [](const radial::CauchyLike&) { return std::string("cauchy"); },
                    },
                    law);
}

Vector haar_unit(Index p, Rng& rng) {
  if (p < 1) throw Error(Errc::InvalidArgument, "p must be at least 1");
  while (true) {
    Vector g = rng.gaussian(p);
    const double norm = g.norm();
    if (norm > 0.0) return g / norm;
  }
}

VectorTuple haar_tuple(Index p, Index n, Rng& rng) {
  Matrix v(p, n);
  for (Index i = 0; i < n; ++i) v.col(i) = haar_unit(p, rng);
  return VectorTuple(std::move(v));
}

VectorTuple sample_elliptical(const EllipticalSpec& spec, Index n) {
  if (n < 1) throw Error(Errc::InvalidArgument, "n must be at least 1");
  if (spec.shape.dim() != spec.p) throw Error(Errc::DimMismatch, "shape matrix size differs from p");
  const Matrix root = mat_sqrt(normalize(spec.shape, Normalization::trace_p)).matrix();
  Rng rng(spec.seed, {kStreamElliptical});
  Matrix x(spec.p, n);
  for (Index i = 0; i < n; ++i) {
    const Vector v = haar_unit(spec.p, rng);
    double u = 0.0;
    // Redraw the rare radial zero so every sample stays nonzero.
    do {
      u = std::visit(overloaded{
                         [](const radial::Constant&) { return 1.0; },
                         [&](const radial::LogNormal& l) { return std::exp(l.s * rng.normal()); },
                         [&](const radial::Pareto& l) { return std::pow(1.0 - rng.uniform(), -1.0 / l.a); },
                         [&](const radial::CauchyLike&) {
                           return std::abs(std::tan(std::numbers::pi * (rng.uniform() - 0.5)));
                         },
                     },
                     spec.u_dist);
    } while (!(u > 0.0) || !std::isfinite(u));
    x.col(i) = u * (root * v);
  }
  return VectorTuple(std::move(x));
}

VectorTuple round_bits(const VectorTuple& x, const std::vector<int>& bits) {
  if (static_cast<Index>(bits.size()) != x.n()) throw Error(Errc::DimMismatch, "one bit count per sample required");
  Matrix out = x.columns();
  const int saved = std::fegetround();
  std::fesetround(FE_TONEAREST);
  for (Index i = 0; i < x.n(); ++i) {
    const int b = bits[static_cast<std::size_t>(i)];
    if (b < 1) {
      std::fesetround(saved);
      throw Error(Errc::InvalidArgument, "bit counts must be at least 1");
    }
    for (Index j = 0; j < x.p(); ++j) out(j, i) = std::ldexp(std::nearbyint(std::ldexp(out(j, i), b)), -b);
    if (out.col(i).squaredNorm() == 0.0) {
      std::fesetround(saved);
      throw Error(Errc::RoundedToZero, "sample " + std::to_string(i) + " rounds to zero at " + std::to_string(b) + " bits");
    }
  }
  std::fesetround(saved);
  return VectorTuple(std::move(out));
}

double coordinate_mass_moment(Index p, Index k, int j) {
  if (k < 1 || k > p) throw Error(Errc::InvalidArgument, "need 1 <= k <= p");
  if (j < 1) throw Error(Errc::InvalidArgument, "moment order must be at least 1");
  const double alpha = 0.5 * static_cast<double>(k);
  const double beta = 0.5 * static_cast<double>(p - k);
  double m = 1.0;
  for (int r = 0; r < j; ++r) m *= (alpha + r) / (alpha + beta + r);
  return m;
}

double covariance_concentration(const VectorTuple& v) {
  const double pn = static_cast<double>(v.p()) / static_cast<double>(v.n());
  const Matrix c = symmetrize(pn * v.columns() * v.columns().transpose()) - Matrix::Identity(v.p(), v.p());
  return sym_op_norm(c);
}

}  // namespace opscale
