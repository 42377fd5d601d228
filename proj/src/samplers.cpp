#include "quantclt/samplers.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace quantclt {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

double ScalarSampler::sample(Rng& rng) const {
  switch (kind) {
    case Kind::Constant:
      return p1;
    case Kind::Normal:
      return p1 + p2 * rng.normal();
    case Kind::Uniform:
      return rng.uniform(p1, p2);
    case Kind::Exponential:
      return rng.exponential(p1);
    case Kind::Laplace: {
      const double u = rng.uniform() - 0.5;
      return p1 - p2 * std::copysign(std::log(1.0 - 2.0 * std::fabs(u)), u);
    }
    case Kind::Cauchy:
      return p1 + p2 * std::tan(kPi * (rng.uniform() - 0.5));
  }
  return 0.0;
}

double ScalarSampler::density(double x) const {
  switch (kind) {
    case Kind::Constant:
      throw std::domain_error("constant sampler has no density");
    case Kind::Normal: {
      const double z = (x - p1) / p2;
      return std::exp(-0.5 * z * z) / (p2 * std::sqrt(2.0 * kPi));
    }
    case Kind::Uniform:
      return (x >= p1 && x <= p2) ? 1.0 / (p2 - p1) : 0.0;
    case Kind::Exponential:
      return x >= 0.0 ? p1 * std::exp(-p1 * x) : 0.0;
    case Kind::Laplace:
      return std::exp(-std::fabs(x - p1) / p2) / (2.0 * p2);
    case Kind::Cauchy: {
      const double z = (x - p1) / p2;
      return 1.0 / (kPi * p2 * (1.0 + z * z));
    }
  }
  return 0.0;
}

double ScalarSampler::mean_or_nan() const {
  switch (kind) {
    case Kind::Constant:
      return p1;
    case Kind::Normal:
    case Kind::Laplace:
      return p1;
    case Kind::Uniform:
      return 0.5 * (p1 + p2);
    case Kind::Exponential:
      return 1.0 / p1;
    case Kind::Cauchy:
      return std::numeric_limits<double>::quiet_NaN();
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::string ScalarSampler::describe() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::Constant:
      out << "constant(" << p1 << ")";
      break;
    case Kind::Normal:
      out << "normal(" << p1 << ", " << p2 << ")";
      break;
    case Kind::Uniform:
      out << "uniform(" << p1 << ", " << p2 << ")";
      break;
    case Kind::Exponential:
      out << "exponential(" << p1 << ")";
      break;
    case Kind::Laplace:
      out << "laplace(" << p1 << ", " << p2 << ")";
      break;
    case Kind::Cauchy:
      out << "cauchy(" << p1 << ", " << p2 << ")";
      break;
  }
  return out.str();
}

}  // namespace quantclt
