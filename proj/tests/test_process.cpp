#include <doctest.h>

#include <cmath>
#include <vector>

#include "quantclt/analytic.hpp"
#include "quantclt/harness.hpp"
#include "quantclt/process.hpp"

using namespace quantclt;

namespace {

double column_mean(const PathBatch& batch, int j) {
  return batch.values.col(j).mean();
}

double column_var(const PathBatch& batch, int j) {
  const auto col = batch.values.col(j);
  const double m = col.mean();
  return (col.array() - m).square().sum() / (col.size() - 1.0);
}

double column_cov(const PathBatch& batch, int i, int j) {
  const auto a = batch.values.col(i);
  const auto b = batch.values.col(j);
  const double ma = a.mean(), mb = b.mean();
  return ((a.array() - ma) * (b.array() - mb)).sum() / (a.size() - 1.0);
}

// MC standard error of a sample covariance between jointly Gaussian
// coordinates: Var(x_s x_t) = K_ss K_tt + K_st^2.
double gauss_cov_se(double kss, double ktt, double kst, int n) {
  return std::sqrt((kss * ktt + kst * kst) / n);
}

}  // namespace

TEST_SUITE_BEGIN("process");

TEST_CASE("fbm gamma=1/2 is Brownian motion: Var X_t = t") {
  const TimeGrid grid({0.0, 0.25, 0.5, 1.0});
  const int n = 20000;
  const PathBatch batch = gen_fbm(grid, 0.5, n, 42);
  REQUIRE(batch.n() == n);
  for (std::size_t j = 1; j < grid.size(); ++j) {
    const double t = grid[j];
    const double se = gauss_cov_se(t, t, t, n);
    CHECK(std::fabs(column_var(batch, static_cast<int>(j)) - t) <= 4.0 * se);
  }
}

TEST_CASE("fbm column at t=0 is exactly zero") {
  for (double gamma : {0.3, 0.5, 0.9}) {
    const PathBatch batch = gen_fbm(TimeGrid({0.0, 0.5, 1.0}), gamma, 200, 7);
    CHECK(batch.values.col(0).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("fbm covariance matches the kernel (gamma=0.75, Cov(X_.5, X_1) = 1/2)") {
  const TimeGrid grid({0.0, 0.5, 1.0});
  const int n = 20000;
  const PathBatch batch = gen_fbm(grid, 0.75, n, 99);
  const double kst = fbm_covariance(0.75, 0.5, 1.0);
  CHECK(kst == doctest::Approx(0.5).epsilon(1e-15));
  const double se = gauss_cov_se(fbm_covariance(0.75, 0.5, 0.5), fbm_covariance(0.75, 1.0, 1.0),
                                 kst, n);
  CHECK(std::fabs(column_cov(batch, 1, 2) - kst) <= 4.0 * se);
}

TEST_CASE("gaussian generator: entrywise covariance error within 5 MC SE at n=20000") {
  const TimeGrid grid({0.0, 0.2, 0.5, 0.8, 1.0});
  const double gamma = 0.6;
  const int n = 20000;
  const PathBatch batch = gen_fbm(grid, gamma, n, 1234);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i; j < grid.size(); ++j) {
      const double kij = fbm_covariance(gamma, grid[i], grid[j]);
      const double kii = fbm_covariance(gamma, grid[i], grid[i]);
      const double kjj = fbm_covariance(gamma, grid[j], grid[j]);
      const double se = gauss_cov_se(kii, kjj, kij, n);
      const double sample = column_cov(batch, static_cast<int>(i), static_cast<int>(j));
      if (se == 0.0) {
        CHECK(sample == 0.0);
      } else {
        CHECK(std::fabs(sample - kij) <= 5.0 * se);
      }
    }
  }
}

TEST_CASE("brownian sheet: zero on axes, product covariance") {
  const TimeGrid2D grid({0.0, 0.5, 1.0}, {0.0, 0.5, 1.0});
  const int n = 20000;
  const PathBatch batch = gen_brownian_sheet(grid, n, 5);
  REQUIRE(batch.num_points() == 9);

  // axis points exactly zero
  for (std::size_t ix = 0; ix < 3; ++ix) {
    CHECK(batch.values.col(static_cast<int>(grid.flat_index(ix, 0))).cwiseAbs().maxCoeff() == 0.0);
    CHECK(batch.values.col(static_cast<int>(grid.flat_index(0, ix))).cwiseAbs().maxCoeff() == 0.0);
  }

  // Var Y(1,1) = 1
  const int corner = static_cast<int>(grid.flat_index(2, 2));
  CHECK(std::fabs(column_var(batch, corner) - 1.0) <= 4.0 * gauss_cov_se(1, 1, 1, n));

  // Cov(Y(.5,1), Y(1,.5)) = min(.5,1) min(1,.5) = 0.25
  const int p1 = static_cast<int>(grid.flat_index(1, 2));
  const int p2 = static_cast<int>(grid.flat_index(2, 1));
  const double se = gauss_cov_se(0.5, 0.5, 0.25, n);
  CHECK(std::fabs(column_cov(batch, p1, p2) - 0.25) <= 4.0 * se);
}

TEST_CASE("sym stable r=2 c=1/2 is standard Brownian motion") {
  const TimeGrid grid({0.0, 0.5, 1.0});
  const int n = 20000;
  const PathBatch batch = gen_sym_stable(grid, 2.0, 0.5, n, 11);
  CHECK(batch.values.col(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::fabs(column_var(batch, 2) - 1.0) <= 4.0 * gauss_cov_se(1, 1, 1, n));
  CHECK(std::fabs(column_mean(batch, 2)) <= 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("sym stable r=1 c=1 is the standard Cauchy process at t=1") {
  const TimeGrid grid({0.0, 1.0});
  const int n = 20000;
  const PathBatch batch = gen_sym_stable(grid, 1.0, 1.0, n, 17);

  std::vector<double> col(n);
  for (int i = 0; i < n; ++i) col[i] = batch.values(i, 1);
  std::sort(col.begin(), col.end());
  const double med = 0.5 * (col[n / 2 - 1] + col[n / 2]);
  const double q75 = col[static_cast<int>(std::ceil(0.75 * n)) - 1];

  // order-statistic asymptotics: SE = sqrt(a(1-a)/n) / f(q_a)
  const double se_med = std::sqrt(0.25 / n) * 3.14159265358979324;        // 1/f(0) = pi
  const double se_q75 = std::sqrt(0.1875 / n) * 2.0 * 3.14159265358979324;  // 1/f(1) = 2 pi
  CHECK(std::fabs(med - 0.0) <= 4.0 * se_med);
  CHECK(std::fabs(q75 - 1.0) <= 4.0 * se_q75);
}

TEST_CASE("stable CMS branch (r=1.5) has symmetric marginals with correct quartiles") {
  const TimeGrid grid({0.0, 1.0});
  const int n = 20000;
  const PathBatch batch = gen_sym_stable(grid, 1.5, 0.7, n, 23);
  CHECK(batch.values.col(0).cwiseAbs().maxCoeff() == 0.0);  // X(0) = 0 exactly
  std::vector<double> col(n);
  for (int i = 0; i < n; ++i) col[i] = batch.values(i, 1);
  std::sort(col.begin(), col.end());
  const double q25 = col[static_cast<int>(std::ceil(0.25 * n)) - 1];
  const double q75 = col[static_cast<int>(std::ceil(0.75 * n)) - 1];
  const double expect = analytic::stable_quantile(1.5, 0.7, 1.0, 0.75);
  const double f75 = analytic::stable_density(1.5, 0.7, 1.0, expect);
  const double se = std::sqrt(0.1875 / n) / f75;
  CHECK(std::fabs(q75 - expect) <= 4.0 * se);
  CHECK(std::fabs(q25 + expect) <= 4.0 * se);
}

TEST_CASE("stable sampler matches the inversion-integral CDF in distribution") {
  // one-sample KS of CMS draws against F(1, .) from the charfn inversion;
  // binds the sampler and the analytic kernel to the same law.
  for (double r : {0.7, 1.5}) {
    const double c = 0.9;
    const int n = 20000;
    const PathBatch batch = gen_sym_stable(TimeGrid({0.0, 1.0}), r, c, n, 271);
    std::vector<double> pit(n);
    for (int i = 0; i < n; ++i) pit[i] = analytic::stable_cdf(r, c, 1.0, batch.values(i, 1));
    std::sort(pit.begin(), pit.end());
    // PIT values must be uniform on (0,1)
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
      d = std::max(d, std::fabs(pit[i] - static_cast<double>(i) / n));
      d = std::max(d, std::fabs(pit[i] - static_cast<double>(i + 1) / n));
    }
    // one-sample asymptotic 0.999 critical value
    const double crit = std::sqrt(-0.5 * std::log(0.0005)) / std::sqrt(static_cast<double>(n));
    CHECK(d < crit);
  }
}

TEST_CASE("stable parameter validation") {
  CHECK_THROWS_AS(gen_sym_stable(TimeGrid({0.0, 1.0}), 2.3, 1.0, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_sym_stable(TimeGrid({0.0, 1.0}), 0.0, 1.0, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_sym_stable(TimeGrid({0.0, 1.0}), 1.0, 0.0, 10, 1), std::invalid_argument);
}

TEST_CASE("compound poisson paths") {
  const TimeGrid grid({0.0, 0.5, 1.0, 2.0});
  const double lambda = 3.0;
  const int n = 20000;

  SUBCASE("value at t=0 is exactly zero and constant jumps reduce to N(t)") {
    const PathBatch batch =
        gen_compound_poisson(grid, lambda, ScalarSampler::constant(1.0), n, 31);
    CHECK(batch.values.col(0).cwiseAbs().maxCoeff() == 0.0);

    // monotone nondecreasing per path
    for (int i = 0; i < 200; ++i)
      for (int j = 1; j < batch.num_points(); ++j)
        CHECK(batch.values(i, j) >= batch.values(i, j - 1));

    // E N(T) = lambda T, Var = lambda T
    const double T = 2.0;
    const double se = std::sqrt(lambda * T / n);
    CHECK(std::fabs(column_mean(batch, 3) - lambda * T) <= 4.0 * se);
  }

  SUBCASE("jump distribution with an atom at zero is rejected") {
    CHECK_THROWS_AS(gen_compound_poisson(grid, lambda, ScalarSampler::constant(0.0), 10, 1),
                    std::invalid_argument);
  }
}

TEST_CASE("add_shift") {
  const TimeGrid grid({0.0, 0.5, 1.0});

  SUBCASE("point mass at zero is the identity") {
    const PathBatch base = gen_fbm(grid, 0.5, 50, 3);
    const PathBatch shifted = add_shift(base, ScalarSampler::constant(0.0), 77);
    CHECK((shifted.values - base.values).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("degenerate base: each path constant at its Z") {
    PathBatch zeros;
    zeros.grid = grid;
    zeros.values = Eigen::MatrixXd::Zero(100, 3);
    zeros.seed_info = {0, 0};
    const PathBatch shifted = add_shift(zeros, ScalarSampler::normal(0.0, 1.0), 5);
    for (int i = 0; i < shifted.n(); ++i) {
      CHECK(shifted.values(i, 0) == shifted.values(i, 1));
      CHECK(shifted.values(i, 1) == shifted.values(i, 2));
    }
    // and the Z's are not all equal
    CHECK(column_var(shifted, 0) > 0.0);
  }

  SUBCASE("shifted fbm variance: t^{2 gamma} + 1") {
    const double gamma = 0.7;
    const int n = 20000;
    const PathBatch batch =
        generate(ProcessSpec::shifted(ProcessSpec::fbm(gamma), ScalarSampler::normal(0.0, 1.0)),
                 grid, n, 13);
    const double expect = std::pow(1.0, 2.0 * gamma) + 1.0;
    CHECK(std::fabs(column_var(batch, 2) - expect) <=
          4.0 * gauss_cov_se(expect, expect, expect, n));
  }
}

TEST_CASE("determinism: identical inputs give bit-identical batches") {
  const TimeGrid grid({0.0, 0.3, 1.0});
  const ProcessSpec spec = ProcessSpec::sym_stable(1.3, 0.9);
  const PathBatch a = generate(spec, grid, 500, 2024, 3);
  const PathBatch b = generate(spec, grid, 500, 2024, 3);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);

  const PathBatch c = generate(spec, grid, 500, 2024, 4);
  CHECK((a.values - c.values).cwiseAbs().maxCoeff() > 0.0);

  // BatchSampler agrees with generate()
  const BatchSampler sampler(spec, grid);
  const PathBatch d = sampler.sample(500, 2024, 3);
  CHECK((a.values - d.values).cwiseAbs().maxCoeff() == 0.0);

  const BatchSampler fbm_sampler(ProcessSpec::fbm(0.6), grid);
  const PathBatch e = fbm_sampler.sample(200, 7, 0);
  const PathBatch f = gen_fbm(grid, 0.6, 200, 7, 0);
  CHECK((e.values - f.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scaling law at the generator level (KS on fixed functionals)") {
  // X(ct) vs c^{1/r} X(t): compare the terminal values across two
  // independent batches; statistic stays below the 0.999 critical value.
  const double c = 4.0;
  const int n = 4000;

  SUBCASE("stable r=1.3") {
    const double r = 1.3;
    const PathBatch a = gen_sym_stable(TimeGrid({0.0, c * 0.25}), r, 1.0, n, 555, 0);
    const PathBatch b = gen_sym_stable(TimeGrid({0.0, 0.25}), r, 1.0, n, 555, 1);
    std::vector<double> xa(n), xb(n);
    for (int i = 0; i < n; ++i) {
      xa[i] = a.values(i, 1);
      xb[i] = std::pow(c, 1.0 / r) * b.values(i, 1);
    }
    CHECK(ks_two_sample(xa, xb) < ks_critical_value(0.999, n, n));
  }

  SUBCASE("fbm gamma=0.75") {
    const double gamma = 0.75;
    const PathBatch a = gen_fbm(TimeGrid({0.0, c * 0.25}), gamma, n, 777, 0);
    const PathBatch b = gen_fbm(TimeGrid({0.0, 0.25}), gamma, n, 777, 1);
    std::vector<double> xa(n), xb(n);
    for (int i = 0; i < n; ++i) {
      xa[i] = a.values(i, 1);
      xb[i] = std::pow(c, gamma) * b.values(i, 1);
    }
    CHECK(ks_two_sample(xa, xb) < ks_critical_value(0.999, n, n));
  }
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(TimeGrid({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid({0.0, 0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid({-0.1, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid2D({0.5, 1.0}, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(LevelGrid({0.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(LevelGrid({0.5, 0.5}), std::invalid_argument);
  CHECK_NOTHROW(TimeGrid({0.1, 1.0}));  // grids need not contain 0
}

TEST_SUITE_END();
