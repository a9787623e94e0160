#pragma once

// Subcommand bodies. They return text or tables and leave argument parsing
// and exit codes to the front end.

#include <iosfwd>
#include <string>
#include <vector>

#include "nrsense/fusion.hpp"
#include "nrsense/mcsim.hpp"
#include "nrsense/scenario.hpp"

namespace nrsense {

/// Round-trip decimal form: 17 significant digits, '.' separator, locale independent.
std::string format_double(double value);

/// One ROC curve per scenario method, all on the same grid.
struct RocTable {
  std::vector<std::string> methods;
  std::vector<RocCurve> curves;
};

RocTable compute_roc(const Scenario& scenario);

/// Header qf, qm_<method>, qd_<method> per method, lambda_1..lambda_M; one
/// row per grid point.
std::string format_roc_csv(const RocTable& table);

/// Computes the ROC table and serializes it.
std::string roc_csv(const Scenario& scenario);

/// End-to-end network simulation at every grid point (`samples` trials each):
/// pf_target, qf, qf_se, qm, qm_se.
std::string mc_csv(const Scenario& scenario);

/// Writes `csv` to scenario.out, plus the effective scenario as
/// "<out>.meta.json". With out == "-" the CSV goes to `stdout_stream` and no
/// sidecar is written.
void write_outputs(const Scenario& scenario, const std::string& command, const std::string& csv,
                   std::ostream& stdout_stream);

} // namespace nrsense
