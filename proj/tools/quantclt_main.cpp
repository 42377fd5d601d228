#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "quantclt/analytic.hpp"
#include "quantclt/config.hpp"
#include "quantclt/harness.hpp"
#include "quantclt/report.hpp"
#include "quantclt/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit contract: 0 all verdicts pass, 1 verdict failure, 2 config/parse
// error, 3 infrastructure error.
constexpr int kExitPass = 0;
constexpr int kExitVerdictFail = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitInfraError = 3;

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&tt));
  return buf;
}

int resolve_threads(int cli_threads) {
  if (cli_threads > 0) return cli_threads;
  if (const char* env = std::getenv("QUANTCLT_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  return 1;
}

void print_summary(const quantclt::Report& report) {
  std::size_t passed = 0;
  for (const auto& row : report.rows)
    if (row.verdict) ++passed;
  std::cout << "experiment: " << report.experiment << "\n";
  for (const auto& note : report.notes) std::cout << "  # " << note << "\n";
  for (const auto& row : report.rows) {
    std::cout << "  [" << (row.verdict ? "pass" : "FAIL") << "] " << row.experiment << " (s="
              << row.pair_s << ", beta=" << row.pair_beta << ", t=" << row.pair_t
              << ", alpha=" << row.pair_alpha << ") estimate=" << row.estimate
              << " analytic=" << row.analytic << " se=" << row.se << " z=" << row.z << "\n";
  }
  std::cout << passed << "/" << report.rows.size() << " rows pass\n";
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::vector<std::string>& overrides, int threads_flag, long long seed_flag) {
  std::string config_text;
  {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot open config file '" << config_path << "'\n";
      return kExitConfigError;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    config_text = buffer.str();
  }

  quantclt::ExperimentConfig cfg;
  try {
    cfg = quantclt::config_from_toml(config_text, overrides);
  } catch (const std::exception& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfigError;
  }
  if (seed_flag >= 0) cfg.seed = static_cast<std::uint64_t>(seed_flag);
  cfg.threads = resolve_threads(threads_flag > 0 ? threads_flag : cfg.threads);

  try {
    fs::create_directories(out_dir);
    const fs::path manifest_path = fs::path(out_dir) / "manifest.json";
    const fs::path report_path = fs::path(out_dir) / "report.csv";

    // Manifest goes down before any results exist.
    json manifest;
    manifest["tool"] = "quantclt";
    manifest["version"] = QUANTCLT_VERSION;
    manifest["config_path"] = config_path;
    manifest["config"] = quantclt::config_to_toml(cfg);
    manifest["overrides"] = overrides;
    manifest["master_seed"] = cfg.seed;
    manifest["threads"] = cfg.threads;
    manifest["started_at"] = iso_timestamp();
    manifest["outputs"] = {report_path.string()};
    {
      std::ofstream out(manifest_path);
      if (!out) throw std::runtime_error("cannot write " + manifest_path.string());
      out << manifest.dump(2) << "\n";
    }

    const quantclt::Report report = quantclt::run_experiment(cfg);

    {
      std::ofstream out(report_path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + report_path.string());
      out << quantclt::report_to_csv(report);
    }
    manifest["finished_at"] = iso_timestamp();
    manifest["all_pass"] = report.passed();
    {
      std::ofstream out(manifest_path);
      if (!out) throw std::runtime_error("cannot rewrite " + manifest_path.string());
      out << manifest.dump(2) << "\n";
    }

    print_summary(report);
    std::cout << "report: " << report_path.string() << "\n";
    return report.passed() ? kExitPass : kExitVerdictFail;
  } catch (const std::invalid_argument& err) {
    // configuration-shaped problems discovered at run time
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitInfraError;
  }
}

int cmd_tables_density(double r, double c, double t, double x_lo, double x_hi, int count,
                       const std::string& out_file) {
  std::ostringstream csv;
  csv << "r,c,t,x,density\n";
  for (int i = 0; i < count; ++i) {
    const double x = count == 1 ? x_lo : x_lo + (x_hi - x_lo) * i / (count - 1);
    csv << quantclt::format_double(r) << ',' << quantclt::format_double(c) << ','
        << quantclt::format_double(t) << ',' << quantclt::format_double(x) << ','
        << quantclt::format_double(quantclt::analytic::stable_density(r, c, t, x)) << '\n';
  }
  if (out_file.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(out_file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_file);
    out << csv.str();
  }
  return kExitPass;
}

int cmd_tables_quantile(double r, double c, double t, double a_lo, double a_hi, int count,
                        const std::string& out_file) {
  std::ostringstream csv;
  csv << "r,c,t,alpha,quantile\n";
  for (int i = 0; i < count; ++i) {
    const double alpha = count == 1 ? a_lo : a_lo + (a_hi - a_lo) * i / (count - 1);
    csv << quantclt::format_double(r) << ',' << quantclt::format_double(c) << ','
        << quantclt::format_double(t) << ',' << quantclt::format_double(alpha) << ','
        << quantclt::format_double(quantclt::analytic::stable_quantile(r, c, t, alpha)) << '\n';
  }
  if (out_file.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(out_file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_file);
    out << csv.str();
  }
  return kExitPass;
}

int cmd_tables_covariance(const std::string& kind, double r, double c, double gamma, double s,
                          double beta, double t, double alpha, const std::string& out_file) {
  double value;
  if (kind == "stable") {
    value = quantclt::analytic::limit_cov_quantile_stable(r, c, s, beta, t, alpha);
  } else if (kind == "fbm") {
    value = quantclt::analytic::limit_cov_quantile_fbm(gamma, s, beta, t, alpha);
  } else {
    std::cerr << "config error: covariance kind must be 'stable' or 'fbm'\n";
    return kExitConfigError;
  }
  std::ostringstream csv;
  csv << "kind,s,beta,t,alpha,covariance\n";
  csv << kind << ',' << quantclt::format_double(s) << ',' << quantclt::format_double(beta) << ','
      << quantclt::format_double(t) << ',' << quantclt::format_double(alpha) << ','
      << quantclt::format_double(value) << '\n';
  if (out_file.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(out_file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_file);
    out << csv.str();
  }
  return kExitPass;
}

// Debug hook for the negative-control selftest path.
bool selftest_density_sabotage() {
  const char* env = std::getenv("QUANTCLT_SELFTEST_SABOTAGE");
  return env != nullptr && std::string(env) == "density";
}

int cmd_selftest(long long seed_flag, int threads_flag) {
  using namespace quantclt;
  const std::uint64_t seed = seed_flag >= 0 ? static_cast<std::uint64_t>(seed_flag) : 20240501ULL;
  int failures = 0;
  auto check = [&failures](const std::string& name, bool ok) {
    std::cout << "  [" << (ok ? "pass" : "FAIL") << "] " << name << "\n";
    if (!ok && failures == 0) std::cout << "first failing property: " << name << "\n";
    if (!ok) ++failures;
  };

  // Analytic oracles
  {
    namespace qa = quantclt::analytic;
    const double gauss_err =
        std::fabs(qa::stable_density(2.0, 0.5, 1.0, 0.0) - 1.0 / std::sqrt(2.0 * 3.14159265358979324));
    const double sabotage = selftest_density_sabotage() ? 1.0 : 0.0;
    check("stable_density oracle", gauss_err + sabotage <= 1e-10);
    check("stable_cdf oracle",
          std::fabs(qa::stable_cdf(1.0, 1.0, 1.0, 1.0) - 0.75) <= 1e-10);
    check("stable_quantile oracle",
          std::fabs(qa::stable_quantile(1.0, 1.0, 1.0, 0.75) - 1.0) <= 1e-9);
    check("quantile scaling identity",
          std::fabs(qa::stable_quantile(1.0, 1.0, 4.0, 0.75) -
                    4.0 * qa::stable_quantile(1.0, 1.0, 1.0, 0.75)) <= 1e-10);
    check("fbm median arcsine covariance",
          std::fabs(qa::limit_cov_quantile_fbm(0.5, 1.0, 0.5, 1.0, 0.5) -
                    3.14159265358979324 / 2.0) <= 1e-9);
  }

  // Exact identity suite
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::IdentitySuite;
  cfg.seed = seed;
  cfg.identity_instances = 10000;
  cfg.threads = resolve_threads(threads_flag);
  const Report report = run_identity_suite(cfg);
  for (const auto& row : report.rows) check(row.experiment, row.verdict);

  const std::uint64_t digest = report_digest(report);
  std::ostringstream hash;
  hash << std::hex << digest;
  std::cout << "summary digest: " << hash.str() << "\n";
  if (failures > 0) {
    std::cout << failures << " selftest properties failed\n";
    return kExitVerdictFail;
  }
  std::cout << "selftest OK\n";
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and verification toolkit for empirical quantile processes of "
               "time-dependent data"};
  app.set_version_flag("--version", QUANTCLT_VERSION);
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run an experiment described by a TOML config");
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  int threads = 0;
  long long seed = -1;
  run->add_option("--config", config_path, "experiment config file (TOML)")->required();
  run->add_option("--out", out_dir, "output directory for manifest.json and report.csv");
  run->add_option("--override", overrides, "key=value config overrides (repeatable)");
  run->add_option("--threads", threads, "worker threads (QUANTCLT_THREADS as fallback)");
  run->add_option("--seed", seed, "master seed override");

  // tables
  auto* tables = app.add_subcommand("tables", "print CSV lattices of analytic objects");
  tables->require_subcommand(1);
  std::string out_file;
  double r = 2.0, c = 0.5, t = 1.0, gamma = 0.5;
  double x_lo = 0.0, x_hi = std::numeric_limits<double>::quiet_NaN();
  double a_lo = 0.5, a_hi = std::numeric_limits<double>::quiet_NaN();
  double s = 1.0, beta = 0.5, tt = 1.0, alpha = 0.5;
  int count = 1;
  std::string cov_kind = "stable";

  auto* density = tables->add_subcommand("density", "stable marginal density f(t, x)");
  density->add_option("--r", r, "stable index in (0,2]")->required();
  density->add_option("--c", c, "stable scale")->required();
  density->add_option("--t", t, "time > 0");
  density->add_option("--x", x_lo, "evaluation point (or lattice start)");
  density->add_option("--x-hi", x_hi, "lattice end");
  density->add_option("--count", count, "lattice size");
  density->add_option("--out", out_file, "write CSV here instead of stdout");

  auto* quantile = tables->add_subcommand("quantile", "stable true quantile tau_alpha(t)");
  quantile->add_option("--r", r, "stable index in (0,2]")->required();
  quantile->add_option("--c", c, "stable scale")->required();
  quantile->add_option("--t", t, "time >= 0");
  quantile->add_option("--alpha", a_lo, "level (or lattice start)");
  quantile->add_option("--alpha-hi", a_hi, "lattice end");
  quantile->add_option("--count", count, "lattice size");
  quantile->add_option("--out", out_file, "write CSV here instead of stdout");

  auto* covariance = tables->add_subcommand("covariance", "limit covariance E(W(s,beta)W(t,alpha))");
  covariance->add_option("--kind", cov_kind, "stable | fbm")->required();
  covariance->add_option("--r", r, "stable index");
  covariance->add_option("--c", c, "stable scale");
  covariance->add_option("--gamma", gamma, "fbm exponent");
  covariance->add_option("--s", s, "first time")->required();
  covariance->add_option("--beta", beta, "first level")->required();
  covariance->add_option("--t", tt, "second time")->required();
  covariance->add_option("--alpha", alpha, "second level")->required();
  covariance->add_option("--out", out_file, "write CSV here instead of stdout");

  // selftest
  auto* selftest = app.add_subcommand("selftest", "exact identity suite plus analytic oracles");
  long long st_seed = -1;
  int st_threads = 0;
  selftest->add_option("--seed", st_seed, "master seed");
  selftest->add_option("--threads", st_threads, "worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, overrides, threads, seed);
    if (tables->parsed()) {
      if (density->parsed()) {
        if (std::isnan(x_hi)) x_hi = x_lo;
        return cmd_tables_density(r, c, t, x_lo, x_hi, count, out_file);
      }
      if (quantile->parsed()) {
        if (std::isnan(a_hi)) a_hi = a_lo;
        return cmd_tables_quantile(r, c, t, a_lo, a_hi, count, out_file);
      }
      if (covariance->parsed())
        return cmd_tables_covariance(cov_kind, r, c, gamma, s, beta, tt, alpha, out_file);
    }
    if (selftest->parsed()) return cmd_selftest(st_seed, st_threads);
  } catch (const std::domain_error& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitInfraError;
  }
  return kExitConfigError;
}
