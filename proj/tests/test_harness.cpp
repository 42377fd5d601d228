#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "quantclt/analytic.hpp"
#include "quantclt/harness.hpp"
#include "quantclt/report.hpp"
#include "quantclt/rng.hpp"
#include "quantclt/stats.hpp"

using namespace quantclt;

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;

ExperimentConfig bm_cov_config() {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::CovConvergence;
  cfg.process = ProcessSpec::brownian_motion();
  cfg.grid = TimeGrid({0.0, 0.5, 1.0});
  cfg.levels = LevelGrid({0.5}, 0.25, 0.75);
  cfg.pairs = {{1.0, 0.5, 1.0, 0.5}, {0.0, 0.5, 1.0, 0.5}};
  cfg.n = 200;
  cfg.R = 400;
  cfg.seed = 91;
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("jackknife covariance matches a brute-force leave-one-out oracle") {
  Rng rng(424242, 0, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const int R = 5 + static_cast<int>(rng.uniform() * 60.0);
    std::vector<double> u(R), v(R);
    for (int i = 0; i < R; ++i) {
      u[i] = rng.normal();
      v[i] = 0.5 * u[i] + rng.normal();
    }
    const auto fast = jackknife_cov(u, v);

    auto plain_cov = [](const std::vector<double>& a, const std::vector<double>& b) {
      const double ma = mean_of(a), mb = mean_of(b);
      double acc = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - ma) * (b[i] - mb);
      return acc / (a.size() - 1.0);
    };
    CHECK(fast.estimate == doctest::Approx(plain_cov(u, v)).epsilon(1e-12));

    // O(R^2) jackknife
    std::vector<double> loo;
    for (int drop = 0; drop < R; ++drop) {
      std::vector<double> ud, vd;
      for (int i = 0; i < R; ++i) {
        if (i == drop) continue;
        ud.push_back(u[i]);
        vd.push_back(v[i]);
      }
      loo.push_back(plain_cov(ud, vd));
    }
    const double lm = mean_of(loo);
    double ss = 0.0;
    for (double x : loo) ss += (x - lm) * (x - lm);
    const double se_brute = std::sqrt((R - 1.0) / R * ss);
    CHECK(fast.se == doctest::Approx(se_brute).epsilon(1e-9));
  }

  CHECK_THROWS_AS(jackknife_cov({1.0, 2.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK(median_of({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median_of({4.0, 1.0, 2.0, 3.0}) == 2.5);
}

TEST_CASE("ks statistic and critical value") {
  CHECK(ks_two_sample({1.0, 2.0, 3.0}, {1.5, 2.5, 3.5}) == doctest::Approx(1.0 / 3.0));
  CHECK(ks_two_sample({1.0, 2.0}, {10.0, 11.0}) == doctest::Approx(1.0));
  // ties across samples count on both sides before evaluating
  CHECK(ks_two_sample({1.0, 2.0}, {1.0, 2.0}) == doctest::Approx(0.0));
  const double crit = ks_critical_value(0.999, 2000, 2000);
  CHECK(crit == doctest::Approx(std::sqrt(-0.5 * std::log(0.0005)) * std::sqrt(2.0 / 2000.0))
                    .epsilon(1e-12));
}

TEST_CASE("cov convergence: Brownian median pair and the degenerate s=0 pair") {
  const Report report = run_cov_convergence(bm_cov_config());
  REQUIRE(report.rows.size() == 2);

  const ReportRow& diag = report.rows[0];
  CHECK(diag.analytic == doctest::Approx(kPi / 2.0).epsilon(1e-8));
  CHECK(diag.se > 0.0);
  CHECK(std::fabs(diag.z) <= 4.0);  // n=200, R=400 smoke bound

  const ReportRow& zero = report.rows[1];
  CHECK(zero.analytic == 0.0);
  CHECK(zero.estimate == 0.0);  // W_n(0, .) is identically zero
  CHECK(zero.z == 0.0);
  CHECK(zero.verdict);
}

TEST_CASE("marginal variance: Cauchy median at t=1") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::MarginalVariance;
  cfg.process = ProcessSpec::sym_stable(1.0, 1.0);
  cfg.grid = TimeGrid({0.0, 1.0});
  cfg.levels = LevelGrid({0.5}, 0.25, 0.75);
  cfg.pairs = {{1.0, 0.5, 1.0, 0.5}};
  cfg.n = 200;
  cfg.R = 400;
  cfg.seed = 17;
  const Report report = run_marginal_variance(cfg);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].analytic == doctest::Approx(kPi * kPi / 4.0).epsilon(1e-8));
  CHECK(std::fabs(report.rows[0].z) <= 4.0);
}

TEST_CASE("marginal variance for a shifted input is nondegenerate at t=0") {
  // fbm + N(0,1): at t = 0 the marginal is the shift law itself, so the
  // limit variance is (a - a^2) / g(tau_a)^2 rather than zero.
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::MarginalVariance;
  cfg.process = ProcessSpec::shifted(ProcessSpec::fbm(0.75), ScalarSampler::normal(0.0, 1.0));
  cfg.grid = TimeGrid({0.0, 1.0});
  cfg.levels = LevelGrid({0.5}, 0.25, 0.75);
  cfg.pairs = {{0.0, 0.5, 0.0, 0.5}, {1.0, 0.5, 1.0, 0.5}};
  cfg.n = 200;
  cfg.R = 400;
  cfg.seed = 61;
  const Report report = run_marginal_variance(cfg);
  REQUIRE(report.rows.size() == 2);

  // t=0: variance of the standard-normal median process, pi/2
  CHECK(report.rows[0].analytic == doctest::Approx(kPi / 2.0).epsilon(1e-9));
  CHECK(std::fabs(report.rows[0].z) <= 4.0);
  // t=1: marginal N(0, 1 + 1), variance (1/4) 2 pi 2 / 1 = pi
  CHECK(report.rows[1].analytic == doctest::Approx(kPi).epsilon(1e-9));
  CHECK(std::fabs(report.rows[1].z) <= 4.0);
}

TEST_CASE("marginal variance via the empirical reference law (shifted compound Poisson)") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::MarginalVariance;
  cfg.process = ProcessSpec::shifted(
      ProcessSpec::compound_poisson(1.0, ScalarSampler::normal(0.0, 1.0)),
      ScalarSampler::normal(0.0, 1.0));
  cfg.grid = TimeGrid({0.0, 1.0});
  cfg.levels = LevelGrid({0.5}, 0.25, 0.75);
  cfg.pairs = {{1.0, 0.5, 1.0, 0.5}};
  cfg.n = 150;
  cfg.R = 300;
  cfg.seed = 29;
  cfg.reference_n = 40000;  // small reference for test speed
  const Report report = run_marginal_variance(cfg);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].analytic > 0.0);
  CHECK(std::fabs(report.rows[0].z) <= 4.0);
  bool mentions_reference = false;
  for (const auto& note : report.notes)
    if (note.find("reference") != std::string::npos) mentions_reference = true;
  CHECK(mentions_reference);
}

TEST_CASE("cov convergence rejects laws without an analytic limit") {
  ExperimentConfig cfg = bm_cov_config();
  cfg.process = ProcessSpec::compound_poisson(1.0, ScalarSampler::normal(0.0, 1.0));
  CHECK_THROWS_WITH_AS(run_cov_convergence(cfg), doctest::Contains("marginal_variance"),
                       std::invalid_argument);
}

TEST_CASE("sup near zero: monotone table for Brownian input") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::SupNearZero;
  cfg.process = ProcessSpec::brownian_motion();
  cfg.grid = TimeGrid({0.0, 0.0025, 0.005, 0.01, 0.025, 0.05, 0.1, 0.15, 0.2});
  cfg.levels = LevelGrid({0.25, 0.5, 0.75}, 0.25, 0.75);
  cfg.deltas = {0.2, 0.1, 0.05, 0.01};
  cfg.epsilon = 1.0;
  cfg.n = 100;
  cfg.R = 200;
  cfg.seed = 5;
  const Report report = run_sup_near_zero(cfg);

  // informational rows carry probabilities; the monotone row must pass
  bool saw_monotone = false, saw_threshold = false;
  for (const auto& row : report.rows) {
    if (row.experiment == "sup_near_zero_monotone") {
      saw_monotone = true;
      CHECK(row.verdict);
    }
    if (row.experiment == "sup_near_zero_smallest_delta") {
      saw_threshold = true;
      CHECK(row.pair_t == 0.01);
    }
    if (row.experiment == "sup_near_zero") {
      CHECK(row.estimate >= 0.0);
      CHECK(row.estimate <= 1.0);
    }
  }
  CHECK(saw_monotone);
  CHECK(saw_threshold);
}

TEST_CASE("scaling law: c=1 passes and the negative control flags a wrong exponent at c=4") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::ScalingLaw;
  cfg.process = ProcessSpec::brownian_motion();
  cfg.grid = TimeGrid({0.0, 0.25, 1.0});
  cfg.levels = LevelGrid({0.5}, 0.25, 0.75);
  cfg.pairs = {{0.25, 0.5, 0.25, 0.5}};
  cfg.n = 100;
  cfg.R = 500;
  cfg.seed = 2;

  SUBCASE("identity scale") {
    cfg.scale_c = 1.0;
    cfg.scaling_negative_control = false;  // powerless at c=1
    const Report report = run_scaling_law(cfg);
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].verdict);
  }

  SUBCASE("c=4 with negative control") {
    cfg.scale_c = 4.0;
    cfg.R = 2000;
    const Report report = run_scaling_law(cfg);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].verdict);                                   // correct exponent
    CHECK(report.rows[1].experiment == "scaling_law_negative_control");
    CHECK(report.rows[1].verdict);                                   // wrong exponent flagged
    CHECK(report.rows[1].estimate > report.rows[0].estimate);
  }
}

TEST_CASE("bahadur residual decays along the n ladder") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::BahadurResidual;
  cfg.process = ProcessSpec::brownian_motion();
  cfg.grid = TimeGrid({0.1, 0.4, 0.7, 1.0});
  cfg.levels = LevelGrid({0.25, 0.5, 0.75}, 0.25, 0.75);
  cfg.n = 100;
  cfg.n_ladder = {100, 1600};
  cfg.R = 150;
  cfg.seed = 3;
  cfg.decay_ratio = 0.8;
  const Report report = run_bahadur_residual(cfg);
  REQUIRE(report.rows.size() == 3);
  CHECK(report.rows[0].estimate > 0.0);
  CHECK(report.rows.back().experiment == "bahadur_decay");
  CHECK(report.rows.back().verdict);

  // zero-at-zero processes cannot include t = 0 here
  cfg.grid = TimeGrid({0.0, 1.0});
  CHECK_THROWS_AS(run_bahadur_residual(cfg), std::invalid_argument);
}

TEST_CASE("bahadur residual matches a hand computation on two paths") {
  // n = 2, alpha = 1/2: tau^n = min(X_1, X_2), nu_n = sqrt(2)(F_n(t,0) - 1/2),
  // residual = max over grid of |sqrt(2) min f(t,0) + nu_n|.
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::BahadurResidual;
  cfg.process = ProcessSpec::brownian_motion();
  cfg.grid = TimeGrid({0.5, 1.0});
  cfg.levels = LevelGrid({0.5}, 0.25, 0.75);
  cfg.n = 2;
  cfg.R = 1;
  cfg.seed = 44;
  const Report report = run_bahadur_residual(cfg);
  REQUIRE(report.rows.size() == 1);

  const BatchSampler sampler(cfg.process, cfg.grid);
  const PathBatch batch = sampler.sample(2, cfg.seed, 0);
  double expect = 0.0;
  for (int j = 0; j < 2; ++j) {
    const double t = cfg.grid[static_cast<std::size_t>(j)];
    const double f_t0 = 1.0 / std::sqrt(2.0 * kPi * t);
    const double tau_n = std::min(batch.values(0, j), batch.values(1, j));
    const double below = (batch.values(0, j) <= 0.0 ? 1 : 0) + (batch.values(1, j) <= 0.0 ? 1 : 0);
    const double nu = std::sqrt(2.0) * (below / 2.0 - 0.5);
    expect = std::max(expect, std::fabs(std::sqrt(2.0) * tau_n * f_t0 + nu));
  }
  CHECK(report.rows[0].estimate == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("identity suite passes on a reduced instance count") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::IdentitySuite;
  cfg.identity_instances = 800;
  cfg.seed = 77;
  const Report report = run_identity_suite(cfg);
  CHECK(report.rows.size() >= 5);
  for (const auto& row : report.rows) {
    INFO(row.experiment);
    CHECK(row.verdict);
  }
}

TEST_CASE("reports are byte-identical across worker counts") {
  ExperimentConfig cfg = bm_cov_config();
  cfg.threads = 1;
  const std::string csv1 = report_to_csv(run_cov_convergence(cfg));
  cfg.threads = 4;
  const std::string csv4 = report_to_csv(run_cov_convergence(cfg));
  CHECK(csv1 == csv4);
  CHECK(report_digest(run_cov_convergence(cfg)) == report_digest(run_cov_convergence(cfg)));

  // and a different seed changes the estimates
  cfg.seed += 1;
  CHECK(report_to_csv(run_cov_convergence(cfg)) != csv1);
}

TEST_CASE("config validation names the offending key") {
  ExperimentConfig cfg = bm_cov_config();
  cfg.pairs.clear();
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("pairs"), std::invalid_argument);

  cfg = bm_cov_config();
  cfg.n = 1;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("'n'"), std::invalid_argument);

  cfg = bm_cov_config();
  cfg.pairs = {{0.7, 0.5, 1.0, 0.5}};  // 0.7 not a grid point
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_SUITE_END();
