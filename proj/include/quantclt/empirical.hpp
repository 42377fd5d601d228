#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "quantclt/grids.hpp"
#include "quantclt/process.hpp"

namespace quantclt {

// F_n(t, x) = #{ i : X_i(t) <= x } / n.
double empirical_cdf(const PathBatch& batch, std::size_t t_index, double x);

struct OrderStat {
  double value;
  int index;  // original position; ties keep index order
};

// Nondecreasing rearrangement with ties broken by the original index.
std::vector<OrderStat> order_statistics(std::span<const double> values);

// j(alpha) = min{ k : k/n >= alpha }, 1-based; the empirical quantile is the
// j(alpha)-th order statistic and does not depend on t beyond the sample.
int quantile_rank(int n, double alpha);

// tau^n_alpha(t) = inf{ x : F_n(t,x) >= alpha }.
double empirical_quantile(const PathBatch& batch, std::size_t t_index, double alpha);

// Empirical quantile surface and the centered scaled field
// W_n(t, alpha) = sqrt(n) (tau^n_alpha(t) - tau_alpha(t)).
struct QuantileField {
  TimeGrid grid;
  LevelGrid levels;
  Eigen::MatrixXd tau_n;  // |grid| x |levels|
  Eigen::MatrixXd w_n;    // same shape
  int n = 0;
};

QuantileField quantile_field(const PathBatch& batch, const LevelGrid& levels,
                             const Eigen::MatrixXd& true_tau);

// max |w_n| over grid cells with t in [t_lo, t_hi] and alpha in [a, b];
// throws if the ranges miss the grids entirely.
double sup_statistic(const QuantileField& field, std::pair<double, double> t_range,
                     std::pair<double, double> level_range);

// Finite-sample inverse identity (the two sides agree exactly; the numeric
// discrepancy is the root-finding budget of F_inv):
//   inf{ beta : F_n(t, F_t^{-1}(beta)) >= alpha }  ==  F_t(tau^n_alpha(t)).
// Returns the max discrepancy over the probe levels. F_t must be strictly
// increasing and continuous; F_inv its inverse on (0,1).
double vervaat_identity_check(const PathBatch& batch, std::size_t t_index,
                              const std::function<double(double)>& F_t,
                              const std::function<double(double)>& F_inv,
                              std::span<const double> probe_levels);

// Convenience overload: derives F_t^{-1} by bracketed root-finding.
double vervaat_identity_check(const PathBatch& batch, std::size_t t_index,
                              const std::function<double(double)>& F_t,
                              std::span<const double> probe_levels);

// Exact finite-sample properties used by the identity suite.

// Sorting is 1-Lipschitz for the sup norm: max_j |x_(j) - y_(j)| <= max_j |x_j - y_j|.
bool order_statistic_lipschitz_holds(std::span<const double> x, std::span<const double> y);

// -(upper (1-alpha)-quantile of -sample) is an alpha-quantile of the sample:
// both defining inequalities P(X <= q) >= alpha and P(X >= q) >= 1 - alpha
// hold with exact counting.
bool quantile_reflection_holds(std::span<const double> sample, double alpha);

}  // namespace quantclt
