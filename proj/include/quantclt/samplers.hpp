#pragma once

#include <stdexcept>
#include <string>

#include "quantclt/rng.hpp"

namespace quantclt {

// Named one-dimensional sampler used for jump marks and additive shifts.
// Where the law has a density we expose it, since the convolved marginal
// f(t,x) = \int g(x-v) dH_t(v) needs g pointwise.
struct ScalarSampler {
  enum class Kind { Constant, Normal, Uniform, Exponential, Laplace, Cauchy };

  Kind kind = Kind::Constant;
  double p1 = 0.0;  // value / mean / lower / rate / location
  double p2 = 0.0;  // sigma / upper / scale

  static ScalarSampler constant(double v) { return {Kind::Constant, v, 0.0}; }
  static ScalarSampler normal(double mu, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("normal sampler: sigma must be > 0");
    return {Kind::Normal, mu, sigma};
  }
  static ScalarSampler uniform(double a, double b) {
    if (!(b > a)) throw std::invalid_argument("uniform sampler: need a < b");
    return {Kind::Uniform, a, b};
  }
  static ScalarSampler exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential sampler: rate must be > 0");
    return {Kind::Exponential, rate, 0.0};
  }
  static ScalarSampler laplace(double mu, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("laplace sampler: scale must be > 0");
    return {Kind::Laplace, mu, scale};
  }
  static ScalarSampler cauchy(double loc, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("cauchy sampler: scale must be > 0");
    return {Kind::Cauchy, loc, scale};
  }

  double sample(Rng& rng) const;

  bool has_density() const { return kind != Kind::Constant; }
  double density(double x) const;

  // True when the density is strictly positive, bounded and continuous on
  // all of R; required of the shift law for the shifted-input CLTs.
  bool strictly_positive_density() const {
    return kind == Kind::Normal || kind == Kind::Laplace || kind == Kind::Cauchy;
  }

  bool has_atom_at_zero() const { return kind == Kind::Constant && p1 == 0.0; }

  double mean_or_nan() const;

  std::string describe() const;
};

}  // namespace quantclt
