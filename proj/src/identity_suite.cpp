#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "quantclt/analytic.hpp"
#include "quantclt/empirical.hpp"
#include "quantclt/harness.hpp"
#include "quantclt/parallel.hpp"
#include "quantclt/rng.hpp"

namespace quantclt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = 3.14159265358979323846264338327950288;

// Samples with deliberate tie mass: integer lattices show up in roughly a
// third of the instances.
std::vector<double> random_sample(Rng& rng, int n) {
  std::vector<double> out(n);
  const double mode = rng.uniform();
  for (int i = 0; i < n; ++i) {
    if (mode < 0.34) {
      out[i] = std::floor(rng.uniform(-4.0, 4.0));  // heavy ties
    } else if (mode < 0.67) {
      out[i] = rng.normal();
    } else {
      out[i] = std::tan(kPi * (rng.uniform() - 0.5));  // heavy tails
    }
  }
  return out;
}

PathBatch single_column_batch(std::vector<double> values) {
  PathBatch batch;
  batch.grid = TimeGrid({0.0, 1.0});
  const int n = static_cast<int>(values.size());
  batch.values = Eigen::MatrixXd::Zero(n, 2);
  for (int i = 0; i < n; ++i) batch.values(i, 1) = values[i];
  return batch;
}

ReportRow count_row(const std::string& name, long long failures, long long instances) {
  ReportRow row;
  row.experiment = name;
  row.pair_s = kNaN;
  row.pair_beta = kNaN;
  row.pair_t = kNaN;
  row.pair_alpha = kNaN;
  row.n = 64;
  row.R = instances;
  row.estimate = static_cast<double>(failures);
  row.se = kNaN;
  row.analytic = 0.0;
  row.z = kNaN;
  row.verdict = failures == 0;
  return row;
}

ReportRow discrepancy_row(const std::string& name, double max_disc, double tol, long long instances) {
  ReportRow row;
  row.experiment = name;
  row.pair_s = kNaN;
  row.pair_beta = kNaN;
  row.pair_t = kNaN;
  row.pair_alpha = kNaN;
  row.n = 64;
  row.R = instances;
  row.estimate = max_disc;
  row.se = kNaN;
  row.analytic = tol;
  row.z = kNaN;
  row.verdict = max_disc <= tol;
  return row;
}

}  // namespace

Report run_identity_suite(const ExperimentConfig& cfg) {
  cfg.validate();
  Report report;
  report.experiment = "identity_suite";
  report.notes = {"instances=" + std::to_string(cfg.identity_instances),
                  "seed=" + std::to_string(cfg.seed)};

  const long long instances = cfg.identity_instances;

  // --- order-statistic Lipschitz: sorting is 1-Lipschitz in sup norm -------
  {
    std::vector<double> failed(instances, 0.0);
    parallel_for(instances, cfg.threads, [&](long long i) {
      Rng rng(cfg.seed, 11, static_cast<std::uint64_t>(i), StreamClass::Scratch);
      const int n = 1 + static_cast<int>(rng.uniform() * 64.0);
      std::vector<double> x = random_sample(rng, n);
      const double delta = rng.uniform() < 0.2 ? 0.0 : std::exp(rng.uniform(-8.0, 1.0));
      std::vector<double> y(x.size());
      for (std::size_t k = 0; k < x.size(); ++k) {
        // adversarial mix: exact +-delta pushes, snapped ties, tiny noise
        const double u = rng.uniform();
        if (u < 0.3)
          y[k] = x[k] + delta;
        else if (u < 0.6)
          y[k] = x[k] - delta;
        else if (u < 0.7)
          y[k] = x[k];
        else
          y[k] = x[k] + delta * (2.0 * rng.uniform() - 1.0);
      }
      if (!order_statistic_lipschitz_holds(x, y)) failed[i] = 1.0;
    });
    const long long failures =
        static_cast<long long>(std::count(failed.begin(), failed.end(), 1.0));
    report.rows.push_back(count_row("identity_order_stat_lipschitz", failures, instances));
  }

  // --- quantile reflection -------------------------------------------------
  {
    std::vector<double> failed(instances, 0.0);
    parallel_for(instances, cfg.threads, [&](long long i) {
      Rng rng(cfg.seed, 12, static_cast<std::uint64_t>(i), StreamClass::Scratch);
      const int n = 1 + static_cast<int>(rng.uniform() * 64.0);
      std::vector<double> x = random_sample(rng, n);
      double alpha;
      if (rng.uniform() < 0.25) {
        // hit the atoms k/n of the empirical CDF exactly
        const int k = 1 + static_cast<int>(rng.uniform() * (n - 1 >= 1 ? n - 1 : 1));
        alpha = std::min(0.999, std::max(0.001, static_cast<double>(k) / n));
      } else {
        alpha = rng.uniform(0.01, 0.99);
      }
      if (!quantile_reflection_holds(x, alpha)) failed[i] = 1.0;
    });
    const long long failures =
        static_cast<long long>(std::count(failed.begin(), failed.end(), 1.0));
    report.rows.push_back(count_row("identity_quantile_reflection", failures, instances));
  }

  // --- Vervaat inverse identity on closed-form marginals -------------------
  {
    std::vector<double> disc(instances, 0.0);
    parallel_for(instances, cfg.threads, [&](long long i) {
      Rng rng(cfg.seed, 13, static_cast<std::uint64_t>(i), StreamClass::Scratch);
      const int n = 1 + static_cast<int>(rng.uniform() * 64.0);
      const bool gaussian = rng.uniform() < 0.5;
      const double scale = std::exp(rng.uniform(-1.0, 1.0));

      std::vector<double> values(n);
      for (int k = 0; k < n; ++k)
        values[k] = gaussian ? scale * rng.normal() : scale * std::tan(kPi * (rng.uniform() - 0.5));
      const PathBatch batch = single_column_batch(std::move(values));

      std::function<double(double)> F, Finv;
      if (gaussian) {
        F = [scale](double x) { return analytic::normal_cdf(x / scale); };
        Finv = [scale](double b) { return scale * analytic::normal_quantile(b); };
      } else {
        F = [scale](double x) { return 0.5 + std::atan(x / scale) / kPi; };
        Finv = [scale](double b) { return scale * std::tan(kPi * (b - 0.5)); };
      }

      std::vector<double> probes = {rng.uniform(0.01, 0.99), rng.uniform(0.01, 0.99)};
      probes.push_back(std::min(0.9, 0.5 / n));  // below the first step
      disc[i] = vervaat_identity_check(batch, 1, F, Finv, probes);
    });
    const double max_disc = *std::max_element(disc.begin(), disc.end());
    report.rows.push_back(discrepancy_row("identity_vervaat_closed_form", max_disc, 1e-9, instances));
  }

  // --- Vervaat on a quadrature-backed stable marginal (fewer instances) ----
  {
    const long long stable_instances = std::max<long long>(1, instances / 1024);
    analytic::StableLaw law(1.5, 0.7);
    std::vector<double> disc(stable_instances, 0.0);
    parallel_for(stable_instances, cfg.threads, [&](long long i) {
      Rng rng(cfg.seed, 14, static_cast<std::uint64_t>(i), StreamClass::Scratch);
      const int n = 1 + static_cast<int>(rng.uniform() * 16.0);
      PathBatch batch = gen_sym_stable(TimeGrid({0.0, 1.0}), 1.5, 0.7, n,
                                       derive_stream(cfg.seed, 14, static_cast<std::uint64_t>(i),
                                                     StreamClass::BasePath));
      auto F = [&law](double x) { return law.cdf(1.0, x); };
      auto Finv = [&law](double b) { return law.quantile(1.0, b); };
      std::vector<double> probes = {rng.uniform(0.05, 0.95)};
      disc[i] = vervaat_identity_check(batch, 1, F, Finv, probes);
    });
    const double max_disc = *std::max_element(disc.begin(), disc.end());
    report.rows.push_back(
        discrepancy_row("identity_vervaat_stable", max_disc, 1e-9, stable_instances));
  }

  // --- empirical quantile == generalized inverse of the empirical CDF ------
  {
    const long long gi_instances = std::max<long long>(1, instances / 10);
    std::vector<double> failed(gi_instances, 0.0);
    parallel_for(gi_instances, cfg.threads, [&](long long i) {
      Rng rng(cfg.seed, 15, static_cast<std::uint64_t>(i), StreamClass::Scratch);
      const int n = 1 + static_cast<int>(rng.uniform() * 64.0);
      const PathBatch batch = single_column_batch(random_sample(rng, n));
      const auto sorted = order_statistics(
          std::span<const double>(batch.values.col(1).data(), static_cast<std::size_t>(n)));
      for (int probe = 0; probe < 8; ++probe) {
        const double alpha = rng.uniform(0.001, 0.999);
        // inf{ x : F_n(t, x) >= alpha } scanned over the order statistics
        double inf_x = std::numeric_limits<double>::quiet_NaN();
        for (const auto& os : sorted) {
          if (empirical_cdf(batch, 1, os.value) >= alpha) {
            inf_x = os.value;
            break;
          }
        }
        if (empirical_quantile(batch, 1, alpha) != inf_x) {
          failed[i] = 1.0;
          break;
        }
      }
    });
    const long long failures =
        static_cast<long long>(std::count(failed.begin(), failed.end(), 1.0));
    report.rows.push_back(count_row("identity_quantile_generalized_inverse", failures, gi_instances));
  }

  // --- level-grid refinement leaves common levels untouched ----------------
  {
    const long long ref_instances = std::max<long long>(1, instances / 10);
    std::vector<double> failed(ref_instances, 0.0);
    const LevelGrid coarse({0.3, 0.5, 0.7}, 0.25, 0.75);
    const LevelGrid fine({0.25, 0.3, 0.4, 0.5, 0.6, 0.7, 0.75}, 0.25, 0.75);
    parallel_for(ref_instances, cfg.threads, [&](long long i) {
      Rng rng(cfg.seed, 16, static_cast<std::uint64_t>(i), StreamClass::Scratch);
      const int n = 2 + static_cast<int>(rng.uniform() * 63.0);
      const PathBatch batch = single_column_batch(random_sample(rng, n));
      const Eigen::MatrixXd zeros_coarse = Eigen::MatrixXd::Zero(2, coarse.size());
      const Eigen::MatrixXd zeros_fine = Eigen::MatrixXd::Zero(2, fine.size());
      const QuantileField fc = quantile_field(batch, coarse, zeros_coarse);
      const QuantileField ff = quantile_field(batch, fine, zeros_fine);
      for (std::size_t k = 0; k < coarse.size(); ++k) {
        const std::size_t kf = fine.index_of(coarse[k]);
        if (fc.tau_n(1, static_cast<int>(k)) != ff.tau_n(1, static_cast<int>(kf))) failed[i] = 1.0;
      }
    });
    const long long failures =
        static_cast<long long>(std::count(failed.begin(), failed.end(), 1.0));
    report.rows.push_back(count_row("identity_level_refinement", failures, ref_instances));
  }

  return report;
}

}  // namespace quantclt
