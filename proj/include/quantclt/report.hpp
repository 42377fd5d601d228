#pragma once

#include <string>
#include <vector>

namespace quantclt {

// One verdict-bearing row. The CSV schema is fixed:
// experiment,pair_s,pair_beta,pair_t,pair_alpha,n,R,estimate,se,analytic,z,verdict
// Fields that do not apply to a given experiment are written as nan.
struct ReportRow {
  std::string experiment;
  double pair_s = 0.0;
  double pair_beta = 0.0;
  double pair_t = 0.0;
  double pair_alpha = 0.0;
  long long n = 0;
  long long R = 0;
  double estimate = 0.0;
  double se = 0.0;
  double analytic = 0.0;
  double z = 0.0;
  bool verdict = false;
};

struct Report {
  std::string experiment;
  std::vector<ReportRow> rows;
  std::vector<std::string> notes;

  bool passed() const {
    for (const auto& row : rows)
      if (!row.verdict) return false;
    return true;
  }
};

// Deterministic formatting: floats at 17 significant digits, '\n' endings.
std::string report_to_csv(const Report& report);

std::string format_double(double v);

// FNV-1a of the CSV body; used by selftest to witness run-to-run determinism.
std::uint64_t report_digest(const Report& report);

}  // namespace quantclt
