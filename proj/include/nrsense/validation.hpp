#pragma once

// Oracle and property checks run by `nrsense validate` and the acceptance
// suite. Each check returns one line: measured value, tolerance, verdict.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nrsense {

struct ValidationOptions {
  std::optional<int> n;       // restrict channel checks to one cascade order
  std::optional<int> L;       // branch count for the mrc report
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  int k = 500;
};

struct CheckResult {
  std::string id;
  std::string title;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  bool asserted = true; // report-only checks never fail a run
  std::string detail;
};

struct CheckInfo {
  std::string id;
  std::string title;
  int criterion; // acceptance item number, 0 for supplementary checks
  bool asserted;
};

/// Every known check, acceptance items first in order.
const std::vector<CheckInfo>& check_catalog();

CheckResult run_check(const std::string& id, const ValidationOptions& options);

/// Fixed-width report, one line per result.
std::string format_report(const std::vector<CheckResult>& results);

} // namespace nrsense
