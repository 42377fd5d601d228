#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "quantclt/grids.hpp"
#include "quantclt/samplers.hpp"

namespace quantclt {

// Declarative description of an input-process law.
struct ProcessSpec {
  enum class Kind { Fbm, BrownianSheet2D, SymStable, CompoundPoisson, Shifted };

  Kind kind = Kind::Fbm;
  double gamma = 0.5;    // Fbm: Hurst exponent in (0,1)
  double r = 2.0;        // SymStable: index in (0,2]
  double c = 0.5;        // SymStable: scale, charfn exp{-c t |u|^r}
  double lambda = 1.0;   // CompoundPoisson: arrival rate
  ScalarSampler jump_dist;  // CompoundPoisson jump marks
  ScalarSampler z_dist;     // Shifted: additive Z
  std::shared_ptr<const ProcessSpec> base;  // Shifted

  static ProcessSpec fbm(double gamma);
  static ProcessSpec brownian_sheet_2d();
  static ProcessSpec sym_stable(double r, double c);
  // r=2, c=1/2 reproduces standard Brownian motion under the charfn convention.
  static ProcessSpec brownian_motion() { return sym_stable(2.0, 0.5); }
  static ProcessSpec compound_poisson(double lambda, ScalarSampler jump_dist);
  static ProcessSpec shifted(ProcessSpec base, ScalarSampler z_dist);

  void validate() const;

  // P(X(0) = 0) = 1, i.e. every unshifted kind.
  bool zero_at_zero() const { return kind != Kind::Shifted; }

  std::string describe() const;
};

struct SeedInfo {
  std::uint64_t master = 0;
  std::uint64_t replication = 0;
};

// n i.i.d. sample paths evaluated on a fixed grid; values(i, j) = X_i(t_j).
// Immutable after construction and safe to share across readers.
struct PathBatch {
  std::variant<TimeGrid, TimeGrid2D> grid;
  Eigen::MatrixXd values;
  SeedInfo seed_info;

  int n() const { return static_cast<int>(values.rows()); }
  int num_points() const { return static_cast<int>(values.cols()); }

  const TimeGrid& time_grid() const { return std::get<TimeGrid>(grid); }
  const TimeGrid2D& time_grid_2d() const { return std::get<TimeGrid2D>(grid); }
};

// Cholesky factor of a covariance matrix with the zero-variance points
// split off; reusable across replications.
class GaussianFactor {
 public:
  GaussianFactor(const Eigen::MatrixXd& cov, const std::string& what);
  // n x m matrix of i.i.d. centered Gaussian rows with the factored law.
  Eigen::MatrixXd sample(int n, std::uint64_t seed, std::uint64_t replication) const;

 private:
  Eigen::MatrixXd chol_;
  std::vector<int> active_;
  int num_points_;
};

// Exact-law generators. Identical (spec, grid, n, seed, replication) input
// gives a bit-identical batch, independent of the number of worker threads.
PathBatch gen_fbm(const TimeGrid& grid, double gamma, int n, std::uint64_t seed,
                  std::uint64_t replication = 0);
PathBatch gen_brownian_sheet(const TimeGrid2D& grid, int n, std::uint64_t seed,
                             std::uint64_t replication = 0);
PathBatch gen_sym_stable(const TimeGrid& grid, double r, double c, int n, std::uint64_t seed,
                         std::uint64_t replication = 0);
PathBatch gen_compound_poisson(const TimeGrid& grid, double lambda, const ScalarSampler& jump_dist,
                               int n, std::uint64_t seed, std::uint64_t replication = 0);

// One independent Z per path, added to every grid value of that path.
PathBatch add_shift(const PathBatch& batch, const ScalarSampler& z_dist, std::uint64_t seed);

// Dispatch on spec.kind; Shifted derives the Z stream from the same master seed.
PathBatch generate(const ProcessSpec& spec, const TimeGrid& grid, int n, std::uint64_t seed,
                   std::uint64_t replication = 0);

// Repeated sampling of one (spec, grid): Gaussian covariances are factored
// once up front. sample() is bit-identical to generate() for equal inputs.
class BatchSampler {
 public:
  BatchSampler(ProcessSpec spec, TimeGrid grid);
  PathBatch sample(int n, std::uint64_t seed, std::uint64_t replication) const;
  const ProcessSpec& spec() const { return spec_; }
  const TimeGrid& grid() const { return grid_; }

 private:
  ProcessSpec spec_;
  TimeGrid grid_;
  std::shared_ptr<const GaussianFactor> factor_;  // Fbm bases only
};

double fbm_covariance(double gamma, double s, double t);

}  // namespace quantclt
