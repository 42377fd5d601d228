#pragma once

#include <vector>

namespace quantclt {

// Fixed-order compensated summation; deterministic for a given input order.
double kahan_sum(const std::vector<double>& xs);

double mean_of(const std::vector<double>& xs);

// Sorted-copy median; even lengths average the two middle order statistics.
double median_of(std::vector<double> xs);

struct EstimateWithSE {
  double estimate = 0.0;
  double se = 0.0;
};

// Sample covariance (divisor R-1) with delete-one jackknife standard error,
// computed in O(R) from centered running sums. u == v gives the variance.
EstimateWithSE jackknife_cov(const std::vector<double>& u, const std::vector<double>& v);

}  // namespace quantclt
