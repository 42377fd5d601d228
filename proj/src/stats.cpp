#include "quantclt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace quantclt {

double kahan_sum(const std::vector<double>& xs) {
  double total = 0.0, comp = 0.0;
  for (double x : xs) {
    const double y = x - comp;
    const double t = total + y;
    comp = (t - total) - y;
    total = t;
  }
  return total;
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean_of: empty input");
  return kahan_sum(xs) / static_cast<double>(xs.size());
}

double median_of(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median_of: empty input");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  if (n % 2 == 1) return xs[n / 2];
  return 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

EstimateWithSE jackknife_cov(const std::vector<double>& u, const std::vector<double>& v) {
  const std::size_t R = u.size();
  if (v.size() != R) throw std::invalid_argument("jackknife_cov: length mismatch");
  if (R < 3) throw std::invalid_argument("jackknife_cov: need at least 3 replications");
  const double mu = mean_of(u);
  const double mv = mean_of(v);

  std::vector<double> products(R);
  for (std::size_t i = 0; i < R; ++i) products[i] = (u[i] - mu) * (v[i] - mv);
  const double S = kahan_sum(products);
  const double Rd = static_cast<double>(R);
  const double est = S / (Rd - 1.0);

  // Leave-one-out covariances from the centered running sums: dropping i
  // shifts both means by a_i/(R-1), so
  //   cov_(i) = (S - a_i b_i R/(R-1)) / (R-2).
  std::vector<double> loo(R);
  for (std::size_t i = 0; i < R; ++i)
    loo[i] = (S - products[i] * Rd / (Rd - 1.0)) / (Rd - 2.0);
  const double loo_mean = mean_of(loo);
  std::vector<double> sq(R);
  for (std::size_t i = 0; i < R; ++i) sq[i] = (loo[i] - loo_mean) * (loo[i] - loo_mean);
  const double se = std::sqrt((Rd - 1.0) / Rd * kahan_sum(sq));
  return {est, se};
}

}  // namespace quantclt
