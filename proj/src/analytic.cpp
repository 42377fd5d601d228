#include "quantclt/analytic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <shared_mutex>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <Eigen/Dense>

namespace quantclt::analytic {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kSqrt2 = 1.41421356237309504880168872420969808;

using GK31 = boost::math::quadrature::gauss_kronrod<double, 31>;

// The Ooura integrators cache node tables across calls but mutate that
// cache lazily, hence thread_local instances.
boost::math::quadrature::ooura_fourier_cos<double>& ooura_cos() {
  thread_local boost::math::quadrature::ooura_fourier_cos<double> integrator(1e-12);
  return integrator;
}

boost::math::quadrature::ooura_fourier_sin<double>& ooura_sin() {
  thread_local boost::math::quadrature::ooura_fourier_sin<double> integrator(1e-12);
  return integrator;
}

// Integration cutoff: beyond u* = (w/c)^{1/r} the charfn factor is below
// exp(-w); w = 46 puts the truncated mass under 1e-20 relative.
double charfn_cutoff(double r, double ct) { return std::pow(46.0 / ct, 1.0 / r); }

// Three-term large-|x| expansions (series in x^{-kr}):
//   P(X > x)  = (1/pi) sum_k (-1)^{k+1} Gamma(kr)/k!  sin(k pi r/2) (ct)^k x^{-kr}
//   f(x)      = (1/pi) sum_k (-1)^{k+1} Gamma(kr+1)/k! sin(k pi r/2) (ct)^k x^{-kr-1}
// For r = 2 every term vanishes (the Gaussian tail is superpolynomial), which
// is consistent with the switch threshold below.
double tail_series_survival(double r, double ct, double x) {
  double acc = 0.0;
  double sign = 1.0;
  double factorial = 1.0;
  for (int k = 1; k <= 3; ++k) {
    factorial *= k;
    acc += sign * std::tgamma(k * r) / factorial * std::sin(0.5 * k * kPi * r) *
           std::pow(ct, k) * std::pow(x, -static_cast<double>(k) * r);
    sign = -sign;
  }
  return std::max(0.0, acc / kPi);
}

double tail_series_density(double r, double ct, double x) {
  double acc = 0.0;
  double sign = 1.0;
  double factorial = 1.0;
  for (int k = 1; k <= 3; ++k) {
    factorial *= k;
    acc += sign * std::tgamma(k * r + 1.0) / factorial * std::sin(0.5 * k * kPi * r) *
           std::pow(ct, k) * std::pow(x, -static_cast<double>(k) * r - 1.0);
    sign = -sign;
  }
  return std::max(0.0, acc / kPi);
}

// The expansion takes over once its truncation error is negligible; below
// that the quadratures stay both accurate and cheap.
bool tail_series_applies(double r, double ct, double x) {
  const double y = x * std::pow(ct, -1.0 / r);  // standardized argument
  if (y < 12.0) return false;
  const double term3 = std::tgamma(3.0 * r) / 6.0 * std::fabs(std::sin(1.5 * kPi * r)) *
                       std::pow(ct, 3.0) * std::pow(x, -3.0 * r) / kPi;
  return term3 <= 1e-13;
}

// \int_0^\infty exp(-ct u^r) cos(xu) du: adaptive Gauss-Kronrod while the
// support holds at most one period, Ooura's Fourier-integral scheme once the
// integrand genuinely oscillates.
double cos_transform(double r, double ct, double x) {
  x = std::fabs(x);
  const double cutoff = charfn_cutoff(r, ct);
  if (x * cutoff <= 2.0 * kPi) {
    auto integrand = [=](double u) { return std::exp(-ct * std::pow(u, r)) * std::cos(x * u); };
    return GK31::integrate(integrand, 0.0, cutoff, 14, 1e-13);
  }
  auto envelope = [=](double u) { return std::exp(-ct * std::pow(u, r)); };
  return ooura_cos().integrate(envelope, x).first;
}

// \int_0^\infty exp(-ct u^r) sin(xu)/u du for x > 0 (odd in x).
double sin_transform(double r, double ct, double x) {
  const double cutoff = charfn_cutoff(r, ct);
  if (x * cutoff <= 2.0 * kPi) {
    auto integrand = [=](double u) {
      if (u == 0.0) return x;
      return std::exp(-ct * std::pow(u, r)) * std::sin(x * u) / u;
    };
    return GK31::integrate(integrand, 0.0, cutoff, 14, 1e-13);
  }
  auto envelope = [=](double u) { return std::exp(-ct * std::pow(u, r)) / u; };
  return ooura_sin().integrate(envelope, x).first;
}

double density_kernel(double r, double c, double t, double x) {
  if (!(t > 0.0)) throw std::domain_error("stable density: t must be > 0 (law degenerates at t = 0)");
  const double ct = c * t;
  if (x == 0.0) {
    // \int_0^\infty exp(-ct u^r) du = Gamma(1 + 1/r) / (ct)^{1/r}
    return std::tgamma(1.0 + 1.0 / r) / (kPi * std::pow(ct, 1.0 / r));
  }
  const double ax = std::fabs(x);
  if (tail_series_applies(r, ct, ax)) return tail_series_density(r, ct, ax);
  return cos_transform(r, ct, x) / kPi;
}

double cdf_kernel(double r, double c, double t, double x) {
  if (!(t > 0.0)) throw std::domain_error("stable cdf: t must be > 0 (law degenerates at t = 0)");
  if (x == 0.0) return 0.5;
  const double ax = std::fabs(x);
  const double ct = c * t;
  if (tail_series_applies(r, ct, ax)) {
    const double tail = tail_series_survival(r, ct, ax);
    return x > 0.0 ? 1.0 - tail : tail;
  }
  const double g = sin_transform(r, ct, ax) / kPi;
  const double F = x > 0.0 ? 0.5 + g : 0.5 - g;
  return std::clamp(F, 0.0, 1.0);
}

void check_stable_params(double r, double c) {
  if (!(r > 0.0 && r <= 2.0)) throw std::invalid_argument("stable index r must be in (0, 2]");
  if (!(c > 0.0)) throw std::invalid_argument("stable scale c must be > 0");
}

}  // namespace

// ---------------------------------------------------------------------------
// Normal helpers
// ---------------------------------------------------------------------------

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); }

double normal_cdf(double z) { return 0.5 * boost::math::erfc(-z / kSqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must be in (0,1)");
  return -kSqrt2 * boost::math::erfc_inv(2.0 * p);
}

double bivariate_normal_cdf(double h, double k, double rho) {
  rho = std::clamp(rho, -1.0, 1.0);
  if (std::isinf(h) || std::isinf(k)) {
    if (h == -std::numeric_limits<double>::infinity() ||
        k == -std::numeric_limits<double>::infinity())
      return 0.0;
    if (std::isinf(h)) return normal_cdf(k);
    return normal_cdf(h);
  }
  // Degenerate limits; at |rho| = 1 - 1e-15 the gap to the limit is ~1e-8.
  if (rho >= 1.0 - 1e-15) return normal_cdf(std::min(h, k));
  if (rho <= -1.0 + 1e-15) return std::max(0.0, normal_cdf(h) + normal_cdf(k) - 1.0);
  if (rho == 0.0) return normal_cdf(h) * normal_cdf(k);

  // P = \int_{-inf}^{h} phi(x) Phi((k - rho x)/sqrt(1-rho^2)) dx, truncated at
  // 8.3 standard deviations (mass below ~5e-17). For |rho| near 1 the inner
  // Phi turns into a near-step around x = k/rho; splitting there keeps the
  // adaptive quadrature honest.
  const double s = std::sqrt((1.0 - rho) * (1.0 + rho));
  const double lo = -8.3;
  const double hi = std::min(h, 8.3);
  if (hi <= lo) return std::max(0.0, normal_cdf(hi));
  auto integrand = [=](double x) { return normal_pdf(x) * normal_cdf((k - rho * x) / s); };

  const double transition = k / rho;
  const double halfwidth = 9.0 * s / std::fabs(rho);
  std::vector<double> knots = {lo};
  for (double candidate : {transition - halfwidth, transition + halfwidth}) {
    if (candidate > knots.back() && candidate < hi) knots.push_back(candidate);
  }
  knots.push_back(hi);

  double p = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    p += GK31::integrate(integrand, knots[i], knots[i + 1], 14, 1e-13);
  return std::clamp(p, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Stable marginals
// ---------------------------------------------------------------------------

double stable_density(double r, double c, double t, double x) {
  check_stable_params(r, c);
  if (!(t > 0.0)) throw std::domain_error("stable_density: t must be > 0 (law degenerates at t = 0)");
  const double scale = std::pow(t, -1.0 / r);
  return scale * density_kernel(r, c, 1.0, x * scale);
}

double stable_cdf(double r, double c, double t, double x) {
  check_stable_params(r, c);
  if (!(t > 0.0)) throw std::domain_error("stable_cdf: t must be > 0 (law degenerates at t = 0)");
  return cdf_kernel(r, c, 1.0, x * std::pow(t, -1.0 / r));
}

double stable_density_direct(double r, double c, double t, double x) {
  check_stable_params(r, c);
  return density_kernel(r, c, t, x);
}

double stable_cdf_direct(double r, double c, double t, double x) {
  check_stable_params(r, c);
  return cdf_kernel(r, c, t, x);
}

double invert_cdf(const std::function<double(double)>& cdf, double alpha, const std::string& what) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error(what + ": quantile level must be in (0,1)");

  // Expand a bracket around 0, then bisect; strict monotonicity of F makes
  // plain bisection safe, and 200 iterations are far beyond what the
  // 1e-12 CDF tolerance needs.
  double lo = -1.0, hi = 1.0;
  double flo = cdf(lo), fhi = cdf(hi);
  for (int i = 0; i < 200 && flo > alpha; ++i) {
    hi = lo;
    fhi = flo;
    lo *= 2.0;
    flo = cdf(lo);
  }
  for (int i = 0; i < 200 && fhi < alpha; ++i) {
    lo = hi;
    flo = fhi;
    hi *= 2.0;
    fhi = cdf(hi);
  }
  if (flo > alpha || fhi < alpha)
    throw std::runtime_error(what + ": bracketing failed, F(" + std::to_string(lo) +
                             ") = " + std::to_string(flo) + ", F(" + std::to_string(hi) +
                             ") = " + std::to_string(fhi) + ", target " + std::to_string(alpha));

  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    mid = 0.5 * (lo + hi);
    const double fmid = cdf(mid);
    if (std::fabs(fmid - alpha) <= 1e-13) return mid;
    if (fmid < alpha)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-15 * std::max(1.0, std::fabs(mid))) break;
  }
  const double err = std::fabs(cdf(mid) - alpha);
  if (err > 1e-12)
    throw std::runtime_error(what + ": quantile root-finding did not converge, bracket [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "], |F - alpha| = " +
                             std::to_string(err));
  return mid;
}

double stable_quantile_at_one(double r, double c, double alpha) {
  check_stable_params(r, c);
  if (alpha == 0.5) return 0.0;
  return invert_cdf([=](double x) { return cdf_kernel(r, c, 1.0, x); }, alpha, "stable_quantile");
}

double stable_quantile(double r, double c, double t, double alpha) {
  if (t == 0.0) return 0.0;  // P(X(0) = 0) = 1
  if (!(t > 0.0)) throw std::domain_error("stable_quantile: t must be >= 0");
  return std::pow(t, 1.0 / r) * stable_quantile_at_one(r, c, alpha);
}

struct StableLaw::Cache {
  std::shared_mutex mutex;
  std::map<double, double> quantiles_at_one;
};

StableLaw::StableLaw(double r, double c) : r_(r), c_(c), cache_(std::make_shared<Cache>()) {
  check_stable_params(r, c);
}

double StableLaw::density(double t, double x) const { return stable_density(r_, c_, t, x); }

double StableLaw::cdf(double t, double x) const { return stable_cdf(r_, c_, t, x); }

double StableLaw::quantile_at_one(double alpha) const {
  {
    std::shared_lock lock(cache_->mutex);
    auto it = cache_->quantiles_at_one.find(alpha);
    if (it != cache_->quantiles_at_one.end()) return it->second;
  }
  const double q = stable_quantile_at_one(r_, c_, alpha);
  std::unique_lock lock(cache_->mutex);
  cache_->quantiles_at_one.emplace(alpha, q);  // idempotent on races
  return q;
}

double StableLaw::quantile(double t, double alpha) const {
  if (t == 0.0) return 0.0;
  return std::pow(t, 1.0 / r_) * quantile_at_one(alpha);
}

double StableLaw::density_at_quantile(double t, double alpha) const {
  // f(t, tau_alpha(t)) = t^{-1/r} f(1, tau_alpha(1))
  return std::pow(t, -1.0 / r_) * density(1.0, quantile_at_one(alpha));
}

// ---------------------------------------------------------------------------
// MarginalLaw
// ---------------------------------------------------------------------------

MarginalLaw MarginalLaw::gaussian(std::function<double(double)> sigma_of_t) {
  MarginalLaw law;
  auto sigma = std::move(sigma_of_t);
  law.density_fn_ = [sigma](double t, double x) {
    const double s = sigma(t);
    if (!(s > 0.0)) throw std::domain_error("gaussian marginal: no density at degenerate t");
    return normal_pdf(x / s) / s;
  };
  law.cdf_fn_ = [sigma](double t, double x) {
    const double s = sigma(t);
    if (!(s > 0.0)) return x < 0.0 ? 0.0 : 1.0;
    return normal_cdf(x / s);
  };
  law.quantile_fn_ = [sigma](double t, double alpha) {
    const double s = sigma(t);
    if (!(s > 0.0)) return 0.0;  // point mass at zero
    return s * normal_quantile(alpha);
  };
  return law;
}

MarginalLaw MarginalLaw::sym_stable(double r, double c) {
  StableLaw stable(r, c);
  MarginalLaw law;
  law.density_fn_ = [stable](double t, double x) { return stable.density(t, x); };
  law.cdf_fn_ = [stable](double t, double x) { return stable.cdf(t, x); };
  law.quantile_fn_ = [stable](double t, double alpha) { return stable.quantile(t, alpha); };
  return law;
}

MarginalLaw MarginalLaw::convolved_gaussian(std::function<double(double)> base_sigma_of_t,
                                            std::function<double(double)> z_density,
                                            std::function<double(double)> z_cdf) {
  MarginalLaw law;
  auto sigma = std::move(base_sigma_of_t);
  auto g = std::move(z_density);
  auto G = std::move(z_cdf);
  law.density_fn_ = [sigma, g](double t, double x) {
    return convolved_density_gaussian(sigma(t), g, x);
  };
  law.cdf_fn_ = [sigma, G](double t, double x) {
    const double s = sigma(t);
    if (s == 0.0) return G(x);
    // P(sY + Z <= x) = E[G(x - sY)], Y standard normal
    auto integrand = [&](double y) { return normal_pdf(y) * G(x - s * y); };
    return std::clamp(GK31::integrate(integrand, -8.3, 8.3, 14, 1e-13), 0.0, 1.0);
  };
  return law;
}

double MarginalLaw::density(double t, double x) const {
  if (!density_fn_) throw std::domain_error("marginal law has no density");
  return density_fn_(t, x);
}

double MarginalLaw::cdf(double t, double x) const { return cdf_fn_(t, x); }

double MarginalLaw::quantile(double t, double alpha) const {
  if (quantile_fn_) return quantile_fn_(t, alpha);
  return invert_cdf([&](double x) { return cdf_fn_(t, x); }, alpha, "marginal quantile");
}

// ---------------------------------------------------------------------------
// Convolutions
// ---------------------------------------------------------------------------

namespace {

// Gauss-Hermite nodes/weights for weight exp(-w^2), via the Golub-Welsch
// symmetric tridiagonal eigenproblem.
struct HermiteRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

const HermiteRule& hermite_rule(int m) {
  static std::mutex mutex;
  static std::map<int, HermiteRule> rules;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = rules.find(m);
  if (it != rules.end()) return it->second;

  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (int i = 1; i < m; ++i) {
    const double off = std::sqrt(0.5 * i);
    J(i, i - 1) = off;
    J(i - 1, i) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(J);
  HermiteRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights.resize(m);
  const double mu0 = std::sqrt(kPi);  // \int exp(-w^2) dw
  for (int i = 0; i < m; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights(i) = mu0 * v0 * v0;
  }
  return rules.emplace(m, std::move(rule)).first->second;
}

}  // namespace

double convolved_density_gaussian(double base_sigma, const std::function<double(double)>& g,
                                  double x, int nodes) {
  if (base_sigma == 0.0) return g(x);
  if (!(base_sigma > 0.0)) throw std::invalid_argument("convolved density: sigma must be >= 0");
  // \int phi_sigma(v) g(x - v) dv with v = sqrt(2) sigma w
  const HermiteRule& rule = hermite_rule(nodes);
  double acc = 0.0;
  for (int i = 0; i < rule.nodes.size(); ++i) {
    acc += rule.weights(i) * g(x - kSqrt2 * base_sigma * rule.nodes(i));
  }
  return acc / std::sqrt(kPi);
}

double convolved_density_empirical(std::span<const double> base_samples,
                                   const std::function<double(double)>& g, double x) {
  if (base_samples.empty()) throw std::invalid_argument("convolved density: empty base sample");
  double acc = 0.0;
  double compensation = 0.0;
  for (double v : base_samples) {
    const double y = g(x - v) - compensation;
    const double t = acc + y;
    compensation = (t - acc) - y;
    acc = t;
  }
  return acc / static_cast<double>(base_samples.size());
}

// ---------------------------------------------------------------------------
// Joint probabilities / limit covariances
// ---------------------------------------------------------------------------

double joint_prob_stable(double r, double c, double s, double t, double a, double b) {
  check_stable_params(r, c);
  if (!(s > 0.0)) throw std::invalid_argument("joint_prob_stable: need s > 0");
  if (s > t) throw std::invalid_argument("joint_prob_stable: need s <= t (order the arguments)");
  if (s == t) return stable_cdf(r, c, s, std::min(a, b));

  // P(X_s <= a, X_t <= b) = F(s,a) - \int_{-inf}^{a} f(s,u) [1 - F(t-s, b-u)] du;
  // the complement form keeps the integrand decaying at both ends, and
  // u = a - tan(theta) maps the half-line to (0, pi/2).
  const double dt = t - s;
  auto integrand = [&](double theta) {
    const double tan_theta = std::tan(theta);
    const double u = a - tan_theta;
    const double sec2 = 1.0 + tan_theta * tan_theta;
    const double fd = stable_density(r, c, s, u);
    if (fd == 0.0) return 0.0;
    const double comp = 1.0 - stable_cdf(r, c, dt, b - u);
    return fd * comp * sec2;
  };
  const double correction = GK31::integrate(integrand, 0.0, 0.5 * kPi, 12, 1e-10);
  return std::clamp(stable_cdf(r, c, s, a) - correction, 0.0, 1.0);
}

double limit_cov_quantile_stable(const StableLaw& law, double s, double beta, double t,
                                 double alpha) {
  if (s == 0.0 || t == 0.0) return 0.0;  // W(0, alpha) = 0
  if (!(s > 0.0 && t > 0.0)) throw std::invalid_argument("limit_cov_quantile_stable: need s,t >= 0");
  if (s > t) return limit_cov_quantile_stable(law, t, alpha, s, beta);

  const double fs = law.density_at_quantile(s, beta);
  const double ft = law.density_at_quantile(t, alpha);
  double joint;
  if (s == t) {
    joint = std::min(alpha, beta);
  } else {
    joint = joint_prob_stable(law.r(), law.c(), s, t, law.quantile(s, beta), law.quantile(t, alpha));
  }
  return (joint - alpha * beta) / (fs * ft);
}

double limit_cov_quantile_stable(double r, double c, double s, double beta, double t,
                                 double alpha) {
  return limit_cov_quantile_stable(StableLaw(r, c), s, beta, t, alpha);
}

double limit_cov_quantile_gaussian(const std::function<double(double, double)>& kernel, double s,
                                   double beta, double t, double alpha) {
  const double vs = kernel(s, s);
  const double vt = kernel(t, t);
  if (vs == 0.0 || vt == 0.0) return 0.0;  // degenerate marginal: W vanishes
  const double sigma_s = std::sqrt(vs);
  const double sigma_t = std::sqrt(vt);
  const double zb = normal_quantile(beta);
  const double za = normal_quantile(alpha);
  double joint;
  if (s == t) {
    // fully dependent: the joint probability is exactly min(alpha, beta)
    joint = std::min(alpha, beta);
  } else {
    const double rho = kernel(s, t) / (sigma_s * sigma_t);
    if (std::fabs(rho) > 1.0 + 1e-9) {
      // more than rounding: the supplied kernel is not a covariance
      static std::atomic<bool> warned{false};
      if (!warned.exchange(true))
        std::fprintf(stderr,
                     "quantclt: warning: correlation %.17g out of [-1,1]; clamping "
                     "(check the covariance kernel)\n",
                     rho);
    }
    joint = bivariate_normal_cdf(zb, za, std::clamp(rho, -1.0, 1.0));
  }
  return sigma_s * sigma_t * (joint - alpha * beta) / (normal_pdf(zb) * normal_pdf(za));
}

double limit_cov_quantile_fbm(double gamma, double s, double beta, double t, double alpha) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("fbm gamma must be in (0,1)");
  if (s == 0.0 || t == 0.0) return 0.0;
  auto kernel = [gamma](double u, double v) {
    return 0.5 * (std::pow(u, 2.0 * gamma) + std::pow(v, 2.0 * gamma) -
                  std::pow(std::fabs(u - v), 2.0 * gamma));
  };
  return limit_cov_quantile_gaussian(kernel, s, beta, t, alpha);
}

double limit_cov_empirical_G(double F_sx, double F_ty, double joint_prob) {
  return joint_prob - F_sx * F_ty;
}

double dist_d(double F_sx, double F_ty, double joint_prob) {
  const double cov = limit_cov_empirical_G(F_sx, F_ty, joint_prob);
  const double d2 = F_sx * (1.0 - F_sx) + F_ty * (1.0 - F_ty) - 2.0 * cov;
  return std::sqrt(std::max(0.0, d2));
}

double limit_cov_empirical_G(const MarginalLaw& law, double s, double x, double t, double y,
                             const JointProbFn& joint_prob) {
  return limit_cov_empirical_G(law.cdf(s, x), law.cdf(t, y), joint_prob(s, x, t, y));
}

double dist_d(const MarginalLaw& law, double s, double x, double t, double y,
              const JointProbFn& joint_prob) {
  return dist_d(law.cdf(s, x), law.cdf(t, y), joint_prob(s, x, t, y));
}

// ---------------------------------------------------------------------------
// Tail-bound constants
// ---------------------------------------------------------------------------

double TailBoundConstants::bound(double u, long long n) const {
  const double exponent = r * std::floor(static_cast<double>(n) * (1.0 - alpha_star));
  return std::pow(lambda_r * std::sqrt(static_cast<double>(n)) / u, exponent);
}

TailBoundConstants tail_bound_constants(double r, double c, double alpha_star, double c_r) {
  check_stable_params(r, c);
  if (!(alpha_star > 0.5 && alpha_star < 1.0))
    throw std::invalid_argument("tail_bound_constants: alpha_star must be in (1/2, 1)");
  if (!(c_r > 0.0)) throw std::invalid_argument("tail_bound_constants: c_r must be > 0");

  TailBoundConstants out;
  out.r = r;
  out.alpha_star = alpha_star;
  out.c_r = c_r;
  out.lambda_r = std::pow(std::pow(2.0, r) * std::exp(1.0) * c_r / (1.0 - alpha_star), 1.0 / r);
  out.threshold_C = std::max(2.0 * out.lambda_r, 2.0 * stable_quantile_at_one(r, c, alpha_star));

  const double log2_lam = 2.0 * std::log2(out.lambda_r);
  long long n0 = 0;
  for (long long n = 1; n <= 100000000LL; ++n) {
    // 2^{-(r floor(n(1-a*)) - 2)} (lambda_r sqrt n)^2 <= 1, checked in log2
    const double lhs = -(r * std::floor(static_cast<double>(n) * (1.0 - alpha_star)) - 2.0) +
                       log2_lam + std::log2(static_cast<double>(n));
    if (lhs <= 0.0) {
      n0 = n;
      break;
    }
  }
  if (n0 == 0) throw std::runtime_error("tail_bound_constants: n0 scan exceeded 1e8");
  out.n0 = n0;
  return out;
}

}  // namespace quantclt::analytic
