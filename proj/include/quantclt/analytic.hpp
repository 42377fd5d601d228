#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace quantclt::analytic {

// ---------------------------------------------------------------------------
// Scalar normal helpers
// ---------------------------------------------------------------------------

double normal_pdf(double z);
double normal_cdf(double z);
double normal_quantile(double p);

// P(Z1 <= h, Z2 <= k) for standard bivariate normal with correlation rho.
// rho is clamped to [-1, 1]; degenerate values handled exactly.
double bivariate_normal_cdf(double h, double k, double rho);

// ---------------------------------------------------------------------------
// Symmetric stable marginals, charfn exp{-c t |u|^r}
// ---------------------------------------------------------------------------
//
// Densities and CDFs are evaluated by cosine/sine inversion of the
// characteristic function at t = 1 and rescaled through
// f(t,x) = t^{-1/r} f(1, x t^{-1/r}).  The *_direct variants evaluate the
// inversion integral at time t itself; they exist as the independent second
// route for the scaling-identity checks.

// Absolute accuracy of the t=1 kernels: ~1e-12 for r >= 0.5 (guaranteed
// 1e-9 by tests); best effort with tolerance 1e-6 below r = 0.5.
double stable_density(double r, double c, double t, double x);
double stable_cdf(double r, double c, double t, double x);
double stable_density_direct(double r, double c, double t, double x);
double stable_cdf_direct(double r, double c, double t, double x);

// Solves F(1,x) = alpha by bracketed root-finding, |F - alpha| <= 1e-12.
double stable_quantile_at_one(double r, double c, double alpha);
// tau_alpha(t) = t^{1/r} tau_alpha(1).
double stable_quantile(double r, double c, double t, double alpha);

// Memoized stable marginal; quantiles at t=1 are cached per (r, c) behind a
// read-mostly lock so repeated harness lookups stay cheap.
class StableLaw {
 public:
  StableLaw(double r, double c);
  double r() const { return r_; }
  double c() const { return c_; }
  double density(double t, double x) const;
  double cdf(double t, double x) const;
  double quantile(double t, double alpha) const;
  double quantile_at_one(double alpha) const;
  double density_at_quantile(double t, double alpha) const;

 private:
  double r_, c_;
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

// ---------------------------------------------------------------------------
// Marginal law handle: F(t,.), f(t,.), tau_alpha(t)
// ---------------------------------------------------------------------------

class MarginalLaw {
 public:
  // Centered Gaussian with standard deviation sigma(t); sigma(t) = 0 gives
  // the point mass at zero (quantiles 0, no density).
  static MarginalLaw gaussian(std::function<double(double)> sigma_of_t);
  static MarginalLaw sym_stable(double r, double c);
  // Gaussian base convolved with an absolutely continuous shift density g.
  static MarginalLaw convolved_gaussian(std::function<double(double)> base_sigma_of_t,
                                        std::function<double(double)> z_density,
                                        std::function<double(double)> z_cdf);

  double density(double t, double x) const;
  double cdf(double t, double x) const;
  // Root-finds F(t,x) = alpha unless a closed form is registered.
  // t = 0 is allowed only when the law degenerates to a point mass there.
  double quantile(double t, double alpha) const;

  bool has_density() const { return static_cast<bool>(density_fn_); }

 private:
  std::function<double(double, double)> density_fn_;
  std::function<double(double, double)> cdf_fn_;
  std::function<double(double, double)> quantile_fn_;  // optional closed form
};

// Generic bracketed quantile solve: F strictly increasing and continuous,
// |F(x) - alpha| <= 1e-12 on success; throws with bracket diagnostics on
// convergence failure.
double invert_cdf(const std::function<double(double)>& cdf, double alpha,
                  const std::string& what);

// ---------------------------------------------------------------------------
// Convolution densities  f(x) = \int g(x - v) dH(v)
// ---------------------------------------------------------------------------

// H = N(0, sigma^2) base, Gauss-Hermite quadrature; sigma = 0 returns g(x).
double convolved_density_gaussian(double base_sigma, const std::function<double(double)>& g,
                                  double x, int nodes = 96);
// H = empirical measure of base samples: mean of g(x - v_i).
double convolved_density_empirical(std::span<const double> base_samples,
                                   const std::function<double(double)>& g, double x);

// ---------------------------------------------------------------------------
// Joint probabilities and limit covariances
// ---------------------------------------------------------------------------

// P(X_s <= a, X_t <= b) for the stationary independent-increment stable
// process, via the increment convolution
//   P = \int_{-infty}^{a} f(s,u) F(t-s, b-u) du,
// absolute accuracy ~1e-9 (1e-7 contract). Requires 0 < s <= t; s == t
// reduces to the min(a,b) marginal.
double joint_prob_stable(double r, double c, double s, double t, double a, double b);

// E(W(s,beta) W(t,alpha)) for the stable quantile limit:
//   [P(X_s <= tau_beta(s), X_t <= tau_alpha(t)) - alpha beta]
//     / [f(s,tau_beta(s)) f(t,tau_alpha(t))],
// and exactly zero when s = 0 or t = 0.
double limit_cov_quantile_stable(double r, double c, double s, double beta, double t, double alpha);
double limit_cov_quantile_stable(const StableLaw& law, double s, double beta, double t, double alpha);

// Same limit object for centered Gaussian inputs with covariance kernel K:
//   sigma_s sigma_t [Phi2(z_beta, z_alpha; rho) - alpha beta]
//     / [phi(z_beta) phi(z_alpha)],  rho = K(s,t)/(sigma_s sigma_t),
// zero whenever one marginal is degenerate.
double limit_cov_quantile_gaussian(const std::function<double(double, double)>& kernel,
                                   double s, double beta, double t, double alpha);
double limit_cov_quantile_fbm(double gamma, double s, double beta, double t, double alpha);

// Empirical-process limit G and its intrinsic pseudo-metric d:
//   Cov = P(X_s <= x, X_t <= y) - F(s,x) F(t,y)
//   d^2 = F(s,x)(1-F(s,x)) + F(t,y)(1-F(t,y)) - 2 Cov.
double limit_cov_empirical_G(double F_sx, double F_ty, double joint_prob);
double dist_d(double F_sx, double F_ty, double joint_prob);

// Same objects from a marginal-law handle plus a joint probability
// (s, x, t, y) -> P(X_s <= x, X_t <= y).
using JointProbFn = std::function<double(double, double, double, double)>;
double limit_cov_empirical_G(const MarginalLaw& law, double s, double x, double t, double y,
                             const JointProbFn& joint_prob);
double dist_d(const MarginalLaw& law, double s, double x, double t, double y,
              const JointProbFn& joint_prob);

// ---------------------------------------------------------------------------
// Tail-bound constants (uniform-in-n quantile tail control)
// ---------------------------------------------------------------------------

// lambda_r^r = 2^r e c_r / (1 - alpha_star) with the norm-tail constant c_r
// supplied by configuration (the theory only asserts its existence);
// n0 = inf{ n >= 1 : 2^{-(r floor(n(1-alpha_star)) - 2)} (lambda_r sqrt n)^2 <= 1 };
// bound(u, n) = (lambda_r sqrt n / u)^{r floor(n(1-alpha_star))}, valid for
// u / sqrt(n) >= C = 2 lambda_r v 2 F_1^{-1}(alpha_star).
struct TailBoundConstants {
  double r = 2.0;
  double alpha_star = 0.75;
  double c_r = 1.0;
  double lambda_r = 0.0;
  long long n0 = 0;
  double threshold_C = 0.0;

  double bound(double u, long long n) const;
};

TailBoundConstants tail_bound_constants(double r, double c, double alpha_star, double c_r = 1.0);

}  // namespace quantclt::analytic
