#include "quantclt/report.hpp"

#include <cstdint>
#include <cstdio>
#include <sstream>

namespace quantclt {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string report_to_csv(const Report& report) {
  std::ostringstream out;
  out << "experiment,pair_s,pair_beta,pair_t,pair_alpha,n,R,estimate,se,analytic,z,verdict\n";
  for (const auto& row : report.rows) {
    out << row.experiment << ',' << format_double(row.pair_s) << ',' << format_double(row.pair_beta)
        << ',' << format_double(row.pair_t) << ',' << format_double(row.pair_alpha) << ',' << row.n
        << ',' << row.R << ',' << format_double(row.estimate) << ',' << format_double(row.se) << ','
        << format_double(row.analytic) << ',' << format_double(row.z) << ','
        << (row.verdict ? "pass" : "fail") << '\n';
  }
  return out.str();
}

std::uint64_t report_digest(const Report& report) {
  const std::string body = report_to_csv(report);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : body) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace quantclt
