#include "nrsense/commands.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <system_error>

#include "nrsense/errors.hpp"
#include "nrsense/version.hpp"

namespace nrsense {

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  if (ec != std::errc{}) throw NumericError("cannot format value");
  return {buf, ptr};
}

RocTable compute_roc(const Scenario& scenario) {
  scenario.validate();
  const std::vector<double> grid = scenario.pf_grid.values();
  RocTable table;
  for (const auto& label : scenario.methods) {
    table.methods.push_back(label);
    table.curves.push_back(roc_sweep(scenario.network(scenario.method(label)), grid, scenario.workers));
  }
  return table;
}

std::string format_roc_csv(const RocTable& table) {
  if (table.curves.empty()) throw InputError("no ROC curves to write");
  const auto& first = table.curves.front().points;
  const std::size_t users = first.empty() ? 0 : first.front().lambdas.size();

  std::string csv = "qf";
  for (const auto& m : table.methods) csv += ",qm_" + m + ",qd_" + m;
  for (std::size_t i = 1; i <= users; ++i) csv += ",lambda_" + std::to_string(i);
  csv += '\n';

  for (std::size_t p = 0; p < first.size(); ++p) {
    csv += format_double(first[p].q_f);
    for (const auto& curve : table.curves) {
      csv += ',' + format_double(curve.points[p].q_m);
      csv += ',' + format_double(curve.points[p].q_d);
    }
    for (double lambda : first[p].lambdas) csv += ',' + format_double(lambda);
    csv += '\n';
  }
  return csv;
}

std::string roc_csv(const Scenario& scenario) { return format_roc_csv(compute_roc(scenario)); }

std::string mc_csv(const Scenario& scenario) {
  scenario.validate();
  const std::vector<double> grid = scenario.pf_grid.values();
  FusionNetwork network = scenario.network(QuadratureMethod{});
  std::string csv = "pf_target,qf,qf_se,qm,qm_se\n";
  for (double pf : grid) {
    for (auto& user : network.users) user.detector.lambda = threshold_for_pf(user.detector.u, pf);
    const CssSim sim = simulate_css(network, scenario.samples, scenario.seed, scenario.workers);
    csv += format_double(pf) + ',' + format_double(sim.q_f.estimate) + ',' + format_double(sim.q_f.std_error) +
           ',' + format_double(sim.q_m.estimate) + ',' + format_double(sim.q_m.std_error) + '\n';
  }
  return csv;
}

void write_outputs(const Scenario& scenario, const std::string& command, const std::string& csv,
                   std::ostream& stdout_stream) {
  if (scenario.out == "-") {
    stdout_stream << csv;
    return;
  }
  {
    std::ofstream out(scenario.out, std::ios::binary);
    if (!out) throw InputError("cannot write '" + scenario.out + "'");
    out << csv;
    if (!out.flush()) throw InputError("write to '" + scenario.out + "' failed");
  }
  nlohmann::json meta;
  meta["command"] = command;
  meta["version"] = kVersion;
  meta["scenario"] = scenario.to_json();
  const std::string sidecar = scenario.out + ".meta.json";
  std::ofstream out(sidecar, std::ios::binary);
  if (!out) throw InputError("cannot write '" + sidecar + "'");
  out << meta.dump(2) << '\n';
  if (!out.flush()) throw InputError("write to '" + sidecar + "' failed");
}

} // namespace nrsense
