#include <doctest.h>

#include <string>

#include "quantclt/config.hpp"

using namespace quantclt;

TEST_SUITE_BEGIN("config");

TEST_CASE("toml subset: scalars, strings, arrays, comments") {
  const std::string text = R"(
# comment
[experiment]
kind = "identity_suite"   # trailing comment
flag = true
count = 42
rate = 2.5e-1
name = "hello world"
xs = [1, 2.5, 3]
nested = [[1, 2], [3, 4]]
)";
  const TomlDocument doc = parse_toml(text);
  const TomlTable& table = doc.at("experiment");
  CHECK(table.at("kind").as_string() == "identity_suite");
  CHECK(table.at("flag").as_bool() == true);
  CHECK(table.at("count").as_number() == 42.0);
  CHECK(table.at("rate").as_number() == doctest::Approx(0.25));
  CHECK(table.at("name").as_string() == "hello world");
  CHECK(table.at("xs").as_array().size() == 3);
  CHECK(table.at("nested").as_array()[1].as_array()[0].as_number() == 3.0);
}

TEST_CASE("toml subset: errors carry line and column") {
  try {
    parse_toml("[experiment]\nbad = @!\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& err) {
    CHECK(err.line == 2);
    CHECK(std::string(err.what()).find("line 2") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_toml("[experiment]\nk = 1\nk = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml("[experiment]\nk = [1, 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_toml("[experiment]\nk = \"open\n"), ConfigError);
}

TEST_CASE("experiment config binding") {
  const std::string text = R"(
[experiment]
kind = "cov_convergence"
process = "sym_stable"
r = 2.0
c = 0.5
times = [0.0, 0.5, 1.0]
levels = [0.5]
level_lo = 0.25
level_hi = 0.75
pairs = [[1.0, 0.5, 1.0, 0.5], [0.5, 0.5, 1.0, 0.5]]
n = 100
R = 50
seed = 9
)";
  const ExperimentConfig cfg = config_from_toml(text);
  CHECK(cfg.kind == ExperimentKind::CovConvergence);
  CHECK(cfg.process.kind == ProcessSpec::Kind::SymStable);
  CHECK(cfg.process.r == 2.0);
  CHECK(cfg.grid.size() == 3);
  CHECK(cfg.levels.a == 0.25);
  CHECK(cfg.pairs.size() == 2);
  CHECK(cfg.n == 100);
  CHECK(cfg.seed == 9);

  SUBCASE("overrides apply and widen nothing else") {
    const ExperimentConfig patched = config_from_toml(text, {"R=10", "seed=11"});
    CHECK(patched.R == 10);
    CHECK(patched.seed == 11);
    CHECK(patched.n == 100);
  }

  SUBCASE("override must reference an existing key") {
    CHECK_THROWS_WITH_AS(config_from_toml(text, {"bogus=1"}), doctest::Contains("bogus"),
                         ConfigError);
  }
}

TEST_CASE("missing required key is named") {
  const std::string text = R"(
[experiment]
kind = "identity_suite"
R = 5
)";
  CHECK_THROWS_WITH_AS(config_from_toml(text), doctest::Contains("'n'"), ConfigError);
}

TEST_CASE("unknown keys are rejected") {
  const std::string text = R"(
[experiment]
kind = "identity_suite"
n = 10
R = 5
gamma = 0.5
)";
  CHECK_THROWS_WITH_AS(config_from_toml(text), doctest::Contains("gamma"), ConfigError);
}

TEST_CASE("process specs from config, including shifted kinds") {
  const std::string text = R"(
[experiment]
kind = "marginal_variance"
process = "compound_poisson"
lambda = 2.0
jump = "normal"
jump_mu = 0.0
jump_sigma = 1.0
shift = "laplace"
shift_mu = 0.0
shift_scale = 1.5
times = [0.0, 1.0]
levels = [0.5]
level_lo = 0.25
level_hi = 0.75
pairs = [[1.0, 0.5]]
n = 16
R = 8
)";
  const ExperimentConfig cfg = config_from_toml(text);
  CHECK(cfg.process.kind == ProcessSpec::Kind::Shifted);
  CHECK(cfg.process.base->kind == ProcessSpec::Kind::CompoundPoisson);
  CHECK(cfg.process.base->lambda == 2.0);
  CHECK(cfg.process.z_dist.kind == ScalarSampler::Kind::Laplace);
  CHECK(cfg.pairs.size() == 1);
  CHECK(cfg.pairs[0].t == 1.0);
  CHECK(cfg.pairs[0].s == 1.0);  // two-element pair duplicates (t, alpha)
}

TEST_CASE("config echo round-trips through the parser") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::ScalingLaw;
  cfg.process = ProcessSpec::brownian_motion();
  cfg.grid = TimeGrid({0.0, 0.25, 0.5, 1.0});
  cfg.levels = LevelGrid({0.5}, 0.25, 0.75);
  cfg.pairs = {{0.25, 0.5, 0.25, 0.5}};
  cfg.n = 64;
  cfg.R = 32;
  cfg.scale_c = 2.0;
  const std::string echo = config_to_toml(cfg);
  const TomlDocument doc = parse_toml(echo);
  CHECK(doc.at("experiment").at("kind").as_string() == "scaling_law");
  CHECK(doc.at("experiment").at("scale_c").as_number() == 2.0);
}

TEST_SUITE_END();
