#include "quantclt/process.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "quantclt/parallel.hpp"
#include "quantclt/rng.hpp"

namespace quantclt {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

// ---------------------------------------------------------------------------
// ProcessSpec
// ---------------------------------------------------------------------------

ProcessSpec ProcessSpec::fbm(double gamma) {
  ProcessSpec spec;
  spec.kind = Kind::Fbm;
  spec.gamma = gamma;
  spec.validate();
  return spec;
}

ProcessSpec ProcessSpec::brownian_sheet_2d() {
  ProcessSpec spec;
  spec.kind = Kind::BrownianSheet2D;
  return spec;
}

ProcessSpec ProcessSpec::sym_stable(double r, double c) {
  ProcessSpec spec;
  spec.kind = Kind::SymStable;
  spec.r = r;
  spec.c = c;
  spec.validate();
  return spec;
}

ProcessSpec ProcessSpec::compound_poisson(double lambda, ScalarSampler jump_dist) {
  ProcessSpec spec;
  spec.kind = Kind::CompoundPoisson;
  spec.lambda = lambda;
  spec.jump_dist = jump_dist;
  spec.validate();
  return spec;
}

ProcessSpec ProcessSpec::shifted(ProcessSpec base, ScalarSampler z_dist) {
  ProcessSpec spec;
  spec.kind = Kind::Shifted;
  spec.base = std::make_shared<const ProcessSpec>(std::move(base));
  spec.z_dist = z_dist;
  spec.validate();
  return spec;
}

void ProcessSpec::validate() const {
  switch (kind) {
    case Kind::Fbm:
      if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("fbm: gamma must be in (0,1)");
      break;
    case Kind::BrownianSheet2D:
      break;
    case Kind::SymStable:
      if (!(r > 0.0 && r <= 2.0)) throw std::invalid_argument("sym_stable: r must be in (0,2]");
      if (!(c > 0.0)) throw std::invalid_argument("sym_stable: c must be > 0");
      break;
    case Kind::CompoundPoisson:
      if (!(lambda > 0.0)) throw std::invalid_argument("compound_poisson: lambda must be > 0");
      if (jump_dist.has_atom_at_zero())
        throw std::invalid_argument("compound_poisson: jump distribution must not have mass at 0");
      break;
    case Kind::Shifted:
      if (!base) throw std::invalid_argument("shifted: missing base spec");
      if (base->kind == Kind::Shifted)
        throw std::invalid_argument("shifted: base must be an unshifted process");
      base->validate();
      break;
  }
}

std::string ProcessSpec::describe() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::Fbm:
      out << "fbm(gamma=" << gamma << ")";
      break;
    case Kind::BrownianSheet2D:
      out << "brownian_sheet_2d";
      break;
    case Kind::SymStable:
      out << "sym_stable(r=" << r << ", c=" << c << ")";
      break;
    case Kind::CompoundPoisson:
      out << "compound_poisson(lambda=" << lambda << ", jumps=" << jump_dist.describe() << ")";
      break;
    case Kind::Shifted:
      out << "shifted(" << base->describe() << " + " << z_dist.describe() << ")";
      break;
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Gaussian batches via covariance factorization
// ---------------------------------------------------------------------------

double fbm_covariance(double gamma, double s, double t) {
  return 0.5 * (std::pow(s, 2.0 * gamma) + std::pow(t, 2.0 * gamma) -
                std::pow(std::fabs(s - t), 2.0 * gamma));
}

GaussianFactor::GaussianFactor(const Eigen::MatrixXd& cov, const std::string& what)
    : num_points_(static_cast<int>(cov.rows())) {
  // Points with zero variance are exactly zero a.s.; factor only the rest.
  active_.reserve(num_points_);
  for (int j = 0; j < num_points_; ++j)
    if (cov(j, j) > 0.0) active_.push_back(j);

  const int ma = static_cast<int>(active_.size());
  if (ma == 0) return;

  Eigen::MatrixXd sub(ma, ma);
  for (int a = 0; a < ma; ++a)
    for (int b = 0; b < ma; ++b) sub(a, b) = cov(active_[a], active_[b]);

  // Jitter escalation 1e-12 -> 1e-8 (relative to the mean diagonal) before
  // giving up; the exact law demands a successful factorization.
  const double diag_scale = sub.diagonal().mean();
  Eigen::LLT<Eigen::MatrixXd> llt;
  for (double jitter : {0.0, 1e-12, 1e-10, 1e-8}) {
    Eigen::MatrixXd attempt = sub;
    if (jitter > 0.0) attempt.diagonal().array() += jitter * diag_scale;
    llt.compute(attempt);
    if (llt.info() == Eigen::Success) {
      chol_ = llt.matrixL();
      return;
    }
  }
  throw std::runtime_error(what + ": covariance not positive definite after jitter escalation (" +
                           std::to_string(ma) + " active grid points)");
}

Eigen::MatrixXd GaussianFactor::sample(int n, std::uint64_t seed, std::uint64_t replication) const {
  if (n < 1) throw std::invalid_argument("GaussianFactor::sample: need n >= 1");
  const int ma = static_cast<int>(active_.size());
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n, num_points_);
  if (ma == 0) return values;
  parallel_for(n, 1, [&](long long i) {
    Rng rng(seed, replication, static_cast<std::uint64_t>(i), StreamClass::BasePath);
    Eigen::VectorXd zvec(ma);
    for (int a = 0; a < ma; ++a) zvec(a) = rng.normal();
    const Eigen::VectorXd x = chol_ * zvec;
    for (int a = 0; a < ma; ++a) values(i, active_[a]) = x(a);
  });
  return values;
}

namespace {

Eigen::MatrixXd fbm_covariance_matrix(const TimeGrid& grid, double gamma) {
  const int m = static_cast<int>(grid.size());
  Eigen::MatrixXd cov(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) cov(i, j) = fbm_covariance(gamma, grid[i], grid[j]);
  return cov;
}

}  // namespace

PathBatch gen_fbm(const TimeGrid& grid, double gamma, int n, std::uint64_t seed,
                  std::uint64_t replication) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gen_fbm: gamma must be in (0,1)");
  grid.validate();
  GaussianFactor factor(fbm_covariance_matrix(grid, gamma),
                        "gen_fbm(gamma=" + std::to_string(gamma) + ")");
  PathBatch batch;
  batch.grid = grid;
  batch.values = factor.sample(n, seed, replication);
  batch.seed_info = {seed, replication};
  return batch;
}

PathBatch gen_brownian_sheet(const TimeGrid2D& grid, int n, std::uint64_t seed,
                             std::uint64_t replication) {
  grid.validate();
  const int mx = static_cast<int>(grid.size_x());
  const int my = static_cast<int>(grid.size_y());
  const int m = mx * my;
  Eigen::MatrixXd cov(m, m);
  for (int ix = 0; ix < mx; ++ix)
    for (int iy = 0; iy < my; ++iy) {
      const int row = static_cast<int>(grid.flat_index(ix, iy));
      for (int jx = 0; jx < mx; ++jx)
        for (int jy = 0; jy < my; ++jy) {
          const int col = static_cast<int>(grid.flat_index(jx, jy));
          cov(row, col) = std::min(grid.points_x[ix], grid.points_x[jx]) *
                          std::min(grid.points_y[iy], grid.points_y[jy]);
        }
    }

  GaussianFactor factor(cov, "gen_brownian_sheet");
  PathBatch batch;
  batch.grid = grid;
  batch.values = factor.sample(n, seed, replication);
  batch.seed_info = {seed, replication};
  return batch;
}

// ---------------------------------------------------------------------------
// Symmetric stable increments
// ---------------------------------------------------------------------------

namespace {

// Standard symmetric r-stable variate with charfn exp{-|u|^r}:
// Gaussian branch at r = 2, Cauchy inversion at r = 1,
// Chambers-Mallows-Stuck otherwise.
double standard_stable(double r, Rng& rng) {
  if (r == 2.0) return std::sqrt(2.0) * rng.normal();
  if (r == 1.0) return std::tan(kPi * (rng.uniform() - 0.5));
  const double theta = kPi * (rng.uniform() - 0.5);
  const double w = rng.exponential();
  const double a = std::sin(r * theta) / std::pow(std::cos(theta), 1.0 / r);
  const double b = std::pow(std::cos((1.0 - r) * theta) / w, (1.0 - r) / r);
  return a * b;
}

}  // namespace

PathBatch gen_sym_stable(const TimeGrid& grid, double r, double c, int n, std::uint64_t seed,
                         std::uint64_t replication) {
  if (!(r > 0.0 && r <= 2.0)) throw std::invalid_argument("gen_sym_stable: r must be in (0,2]");
  if (!(c > 0.0)) throw std::invalid_argument("gen_sym_stable: c must be > 0");
  grid.validate();
  if (n < 1) throw std::invalid_argument("gen_sym_stable: need n >= 1");

  const int m = static_cast<int>(grid.size());
  PathBatch batch;
  batch.grid = grid;
  batch.values.resize(n, m);
  batch.seed_info = {seed, replication};

  // Increment over [t_{j-1}, t_j] is (c dt)^{1/r} S with S standard; the grid
  // skeleton then carries the exact finite-dimensional law.
  std::vector<double> inc_scale(m);
  double prev = 0.0;
  for (int j = 0; j < m; ++j) {
    inc_scale[j] = std::pow(c * (grid[j] - prev), 1.0 / r);
    prev = grid[j];
  }

  Eigen::MatrixXd& values = batch.values;
  parallel_for(n, 1, [&](long long i) {
    Rng rng(seed, replication, static_cast<std::uint64_t>(i), StreamClass::BasePath);
    double x = 0.0;
    for (int j = 0; j < m; ++j) {
      if (inc_scale[j] > 0.0) x += inc_scale[j] * standard_stable(r, rng);
      values(i, j) = x;
    }
  });
  return batch;
}

// ---------------------------------------------------------------------------
// Compound Poisson
// ---------------------------------------------------------------------------

PathBatch gen_compound_poisson(const TimeGrid& grid, double lambda, const ScalarSampler& jump_dist,
                               int n, std::uint64_t seed, std::uint64_t replication) {
  if (!(lambda > 0.0)) throw std::invalid_argument("gen_compound_poisson: lambda must be > 0");
  if (jump_dist.has_atom_at_zero())
    throw std::invalid_argument("gen_compound_poisson: jump distribution must not have mass at 0");
  grid.validate();
  if (n < 1) throw std::invalid_argument("gen_compound_poisson: need n >= 1");

  const int m = static_cast<int>(grid.size());
  const double horizon = grid.horizon();
  PathBatch batch;
  batch.grid = grid;
  batch.values.resize(n, m);
  batch.seed_info = {seed, replication};

  Eigen::MatrixXd& values = batch.values;
  parallel_for(n, 1, [&](long long i) {
    Rng arrivals_rng(seed, replication, static_cast<std::uint64_t>(i), StreamClass::BasePath);
    Rng marks_rng(seed, replication, static_cast<std::uint64_t>(i), StreamClass::JumpMarks);

    // Exponential spacings up to the horizon, then prefix sums of the marks.
    std::vector<double> arrival_times;
    std::vector<double> cumulative;
    double clock = arrivals_rng.exponential(lambda);
    double running = 0.0;
    while (clock <= horizon) {
      running += jump_dist.sample(marks_rng);
      arrival_times.push_back(clock);
      cumulative.push_back(running);
      clock += arrivals_rng.exponential(lambda);
    }

    for (int j = 0; j < m; ++j) {
      // number of arrivals <= t_j
      const auto it = std::upper_bound(arrival_times.begin(), arrival_times.end(), grid[j]);
      const std::size_t count = static_cast<std::size_t>(it - arrival_times.begin());
      values(i, j) = count == 0 ? 0.0 : cumulative[count - 1];
    }
  });
  return batch;
}

// ---------------------------------------------------------------------------
// Shifts and dispatch
// ---------------------------------------------------------------------------

PathBatch add_shift(const PathBatch& batch, const ScalarSampler& z_dist, std::uint64_t seed) {
  PathBatch shifted = batch;
  const int n = batch.n();
  Eigen::MatrixXd& values = shifted.values;
  parallel_for(n, 1, [&](long long i) {
    Rng rng(seed, batch.seed_info.replication, static_cast<std::uint64_t>(i), StreamClass::Shift);
    values.row(i).array() += z_dist.sample(rng);
  });
  return shifted;
}

PathBatch generate(const ProcessSpec& spec, const TimeGrid& grid, int n, std::uint64_t seed,
                   std::uint64_t replication) {
  spec.validate();
  switch (spec.kind) {
    case ProcessSpec::Kind::Fbm:
      return gen_fbm(grid, spec.gamma, n, seed, replication);
    case ProcessSpec::Kind::SymStable:
      return gen_sym_stable(grid, spec.r, spec.c, n, seed, replication);
    case ProcessSpec::Kind::CompoundPoisson:
      return gen_compound_poisson(grid, spec.lambda, spec.jump_dist, n, seed, replication);
    case ProcessSpec::Kind::Shifted: {
      PathBatch base = generate(*spec.base, grid, n, seed, replication);
      return add_shift(base, spec.z_dist, seed);
    }
    case ProcessSpec::Kind::BrownianSheet2D:
      throw std::invalid_argument("generate: the 2-parameter sheet needs a TimeGrid2D; call gen_brownian_sheet");
  }
  throw std::logic_error("generate: unreachable");
}

BatchSampler::BatchSampler(ProcessSpec spec, TimeGrid grid)
    : spec_(std::move(spec)), grid_(std::move(grid)) {
  spec_.validate();
  grid_.validate();
  const ProcessSpec* base = spec_.kind == ProcessSpec::Kind::Shifted ? spec_.base.get() : &spec_;
  if (base->kind == ProcessSpec::Kind::BrownianSheet2D)
    throw std::invalid_argument("BatchSampler: the 2-parameter sheet needs a TimeGrid2D");
  if (base->kind == ProcessSpec::Kind::Fbm) {
    factor_ = std::make_shared<const GaussianFactor>(
        fbm_covariance_matrix(grid_, base->gamma),
        "gen_fbm(gamma=" + std::to_string(base->gamma) + ")");
  }
}

PathBatch BatchSampler::sample(int n, std::uint64_t seed, std::uint64_t replication) const {
  if (!factor_) return generate(spec_, grid_, n, seed, replication);
  PathBatch batch;
  batch.grid = grid_;
  batch.values = factor_->sample(n, seed, replication);
  batch.seed_info = {seed, replication};
  if (spec_.kind == ProcessSpec::Kind::Shifted) return add_shift(batch, spec_.z_dist, seed);
  return batch;
}

}  // namespace quantclt
