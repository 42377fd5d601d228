#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quantclt/grids.hpp"
#include "quantclt/process.hpp"
#include "quantclt/report.hpp"

namespace quantclt {

enum class ExperimentKind {
  CovConvergence,
  MarginalVariance,
  SupNearZero,
  ScalingLaw,
  BahadurResidual,
  IdentitySuite,
};

std::string experiment_kind_name(ExperimentKind kind);
ExperimentKind experiment_kind_from_name(const std::string& name);

// A covariance target ((s, beta), (t, alpha)); marginal-variance targets use
// s = t, beta = alpha.
struct PairSpec {
  double s = 0.0;
  double beta = 0.5;
  double t = 1.0;
  double alpha = 0.5;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::IdentitySuite;
  ProcessSpec process = ProcessSpec::brownian_motion();
  TimeGrid grid = TimeGrid::regular(1.0, 2);
  LevelGrid levels = LevelGrid({0.5}, 0.25, 0.75);
  int n = 100;                  // paths per replication
  long long R = 100;            // replications
  std::uint64_t seed = 1;       // master seed
  double z_max = 3.0;           // |z| acceptance bound
  double ks_level = 0.999;      // KS critical-value level
  int threads = 1;

  std::vector<PairSpec> pairs;  // CovConvergence / MarginalVariance
  std::vector<double> deltas = {0.2, 0.1, 0.05, 0.01};  // SupNearZero
  double epsilon = 1.0;                                 // SupNearZero sup threshold
  double sup_prob_threshold = 0.05;                     // SupNearZero: bound at smallest delta
  std::vector<int> n_ladder;    // SupNearZero / BahadurResidual (defaults to {n})
  double scale_c = 2.0;         // ScalingLaw time-scale factor
  // Emit the wrong-exponent power check. It only has power when
  // scale_c^0.3 is well above 1 + the KS critical value.
  bool scaling_negative_control = true;
  double decay_ratio = 0.8;     // BahadurResidual: required median ratio
  int identity_instances = 10000;   // IdentitySuite randomized instances
  long long reference_n = 1000000;  // empirical reference size (no closed form)

  // Throws std::invalid_argument naming the offending key.
  void validate() const;
};

// Replications run as independent work units on derived seed streams;
// per-replication results land in preassigned slots and are reduced in fixed
// order, so reports are byte-identical for any worker count.
Report run_experiment(const ExperimentConfig& cfg);

Report run_cov_convergence(const ExperimentConfig& cfg);
Report run_marginal_variance(const ExperimentConfig& cfg);
Report run_sup_near_zero(const ExperimentConfig& cfg);
Report run_scaling_law(const ExperimentConfig& cfg);
Report run_bahadur_residual(const ExperimentConfig& cfg);
Report run_identity_suite(const ExperimentConfig& cfg);

// Two-sample Kolmogorov-Smirnov statistic and the asymptotic critical value
// at the given level.
double ks_two_sample(std::vector<double> a, std::vector<double> b);
double ks_critical_value(double level, std::size_t n1, std::size_t n2);

}  // namespace quantclt
