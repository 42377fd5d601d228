#include "quantclt/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "quantclt/analytic.hpp"

namespace quantclt {

double empirical_cdf(const PathBatch& batch, std::size_t t_index, double x) {
  const int n = batch.n();
  if (t_index >= static_cast<std::size_t>(batch.num_points()))
    throw std::out_of_range("empirical_cdf: t_index out of range");
  int count = 0;
  for (int i = 0; i < n; ++i)
    if (batch.values(i, static_cast<int>(t_index)) <= x) ++count;
  return static_cast<double>(count) / static_cast<double>(n);
}

std::vector<OrderStat> order_statistics(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("order_statistics: empty input");
  std::vector<OrderStat> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = {values[i], static_cast<int>(i)};
  // stable sort keeps the priority of the original index among ties
  std::stable_sort(out.begin(), out.end(),
                   [](const OrderStat& a, const OrderStat& b) { return a.value < b.value; });
  return out;
}

int quantile_rank(int n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("quantile rank: alpha must be in (0,1)");
  // min{ k : k/n >= alpha }; start from ceil(n alpha) and settle the defining
  // inequality exactly, since the product can land one ulp off an integer.
  int j = std::clamp(static_cast<int>(std::ceil(static_cast<double>(n) * alpha)), 1, n);
  while (j > 1 && static_cast<double>(j - 1) / static_cast<double>(n) >= alpha) --j;
  while (j < n && static_cast<double>(j) / static_cast<double>(n) < alpha) ++j;
  return j;
}

double empirical_quantile(const PathBatch& batch, std::size_t t_index, double alpha) {
  const int n = batch.n();
  if (t_index >= static_cast<std::size_t>(batch.num_points()))
    throw std::out_of_range("empirical_quantile: t_index out of range");
  std::vector<double> column(n);
  for (int i = 0; i < n; ++i) column[i] = batch.values(i, static_cast<int>(t_index));
  const int j = quantile_rank(n, alpha);
  std::nth_element(column.begin(), column.begin() + (j - 1), column.end());
  return column[j - 1];
}

QuantileField quantile_field(const PathBatch& batch, const LevelGrid& levels,
                             const Eigen::MatrixXd& true_tau) {
  const auto* grid = std::get_if<TimeGrid>(&batch.grid);
  if (grid == nullptr) throw std::invalid_argument("quantile_field: needs a 1-parameter batch");
  const int m = static_cast<int>(grid->size());
  const int L = static_cast<int>(levels.size());
  if (true_tau.rows() != m || true_tau.cols() != L)
    throw std::invalid_argument("quantile_field: true_tau shape mismatch (want " +
                                std::to_string(m) + "x" + std::to_string(L) + ", got " +
                                std::to_string(true_tau.rows()) + "x" +
                                std::to_string(true_tau.cols()) + ")");

  const int n = batch.n();
  QuantileField field;
  field.grid = *grid;
  field.levels = levels;
  field.n = n;
  field.tau_n.resize(m, L);
  field.w_n.resize(m, L);

  const double sqrt_n = std::sqrt(static_cast<double>(n));
  std::vector<double> column(n);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) column[i] = batch.values(i, j);
    std::sort(column.begin(), column.end());
    for (int k = 0; k < L; ++k) {
      const double tau = column[quantile_rank(n, levels[k]) - 1];
      field.tau_n(j, k) = tau;
      field.w_n(j, k) = sqrt_n * (tau - true_tau(j, k));
    }
  }
  return field;
}

double sup_statistic(const QuantileField& field, std::pair<double, double> t_range,
                     std::pair<double, double> level_range) {
  double sup = -1.0;
  bool hit = false;
  for (std::size_t j = 0; j < field.grid.size(); ++j) {
    const double t = field.grid[j];
    if (t < t_range.first || t > t_range.second) continue;
    for (std::size_t k = 0; k < field.levels.size(); ++k) {
      const double alpha = field.levels[k];
      if (alpha < level_range.first || alpha > level_range.second) continue;
      hit = true;
      sup = std::max(sup, std::fabs(field.w_n(static_cast<int>(j), static_cast<int>(k))));
    }
  }
  if (!hit)
    throw std::invalid_argument("sup_statistic: requested ranges do not intersect the grids");
  return sup;
}

double vervaat_identity_check(const PathBatch& batch, std::size_t t_index,
                              const std::function<double(double)>& F_t,
                              const std::function<double(double)>& F_inv,
                              std::span<const double> probe_levels) {
  // The step function beta -> F_n(t, F_t^{-1}(beta)) is nondecreasing, so
  // the generalized inverse at alpha is found by bisection on beta.
  auto lhs_at = [&](double alpha) {
    auto reaches = [&](double beta) {
      if (beta <= 0.0) return false;  // F_n(-inf) = 0 < alpha
      if (beta >= 1.0) return true;   // F_n(+inf) = 1 >= alpha
      return empirical_cdf(batch, t_index, F_inv(beta)) >= alpha;
    };
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 64; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (reaches(mid))
        hi = mid;
      else
        lo = mid;
    }
    return hi;
  };

  double max_discrepancy = 0.0;
  for (double alpha : probe_levels) {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::domain_error("vervaat_identity_check: probe level must be in (0,1)");
    const double lhs = lhs_at(alpha);
    const double rhs = F_t(empirical_quantile(batch, t_index, alpha));
    max_discrepancy = std::max(max_discrepancy, std::fabs(lhs - rhs));
  }
  return max_discrepancy;
}

double vervaat_identity_check(const PathBatch& batch, std::size_t t_index,
                              const std::function<double(double)>& F_t,
                              std::span<const double> probe_levels) {
  auto F_inv = [&F_t](double beta) {
    return analytic::invert_cdf(F_t, beta, "vervaat F_inv");
  };
  return vervaat_identity_check(batch, t_index, F_t, F_inv, probe_levels);
}

bool order_statistic_lipschitz_holds(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty())
    throw std::invalid_argument("order_statistic_lipschitz_holds: need equal nonempty samples");
  double delta = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) delta = std::max(delta, std::fabs(x[i] - y[i]));
  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (std::fabs(xs[i] - ys[i]) > delta) return false;
  return true;
}

bool quantile_reflection_holds(std::span<const double> sample, double alpha) {
  const std::size_t n = sample.size();
  if (n == 0) throw std::invalid_argument("quantile_reflection_holds: empty sample");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("quantile_reflection_holds: alpha must be in (0,1)");

  // Upper (1-alpha)-quantile of the negated sample: inf{ x : G_n(x) > 1-alpha }
  // is the (floor(n(1-alpha)) + 1)-th order statistic.
  std::vector<double> negated(n);
  for (std::size_t i = 0; i < n; ++i) negated[i] = -sample[i];
  std::sort(negated.begin(), negated.end());
  const long double np = static_cast<long double>(n) * (1.0L - static_cast<long double>(alpha));
  std::size_t rank = static_cast<std::size_t>(std::floor(np)) + 1;
  rank = std::min(rank, n);
  const double q = -negated[rank - 1];

  // alpha-quantile inequalities for the original sample, exact counting.
  std::size_t count_le = 0, count_ge = 0;
  for (double v : sample) {
    if (v <= q) ++count_le;
    if (v >= q) ++count_ge;
  }
  const long double na = static_cast<long double>(n) * static_cast<long double>(alpha);
  return static_cast<long double>(count_le) >= na &&
         static_cast<long double>(count_ge) >= static_cast<long double>(n) - na;
}

}  // namespace quantclt
