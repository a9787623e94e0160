// nrsense: ROC curves, Monte Carlo runs and oracle checks for energy-detector
// cooperative sensing over cascaded Rayleigh channels.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nrsense/commands.hpp"
#include "nrsense/detector.hpp"
#include "nrsense/errors.hpp"
#include "nrsense/scenario.hpp"
#include "nrsense/validation.hpp"
#include "nrsense/version.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumeric = 2, kValidation = 3 };

/// Scenario flags. Unset flags leave the config file (or defaults) alone.
struct ScenarioFlags {
  std::optional<std::string> config;
  std::optional<int> n;
  std::optional<double> snr_db;
  std::optional<double> u;
  std::optional<int> L;
  std::optional<int> users;
  std::optional<double> pe;
  std::optional<int> k;
  std::optional<std::string> methods;
  std::optional<std::string> pf_grid;
  std::optional<double> pf;
  std::optional<std::uint64_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out;

  void attach(CLI::App& app) {
    app.add_option("--config", config, "JSON scenario file");
    app.add_option("--n", n, "cascade order of every user");
    app.add_option("--snr-db", snr_db, "scale SNR of every user, dB");
    app.add_option("--u", u, "time-bandwidth product of every user");
    app.add_option("--L", L, "MRC branches of every user");
    app.add_option("--users", users, "number of users (replicates the last profile)");
    app.add_option("--pe", pe, "reporting error probability of every user");
    app.add_option("--k", k, "series truncation order");
    app.add_option("--methods", methods, "comma list of series, quadrature, monte_carlo");
    app.add_option("--pf-grid", pf_grid, "per-user false-alarm grid min:max:count (log spaced)");
    app.add_option("--pf", pf, "single-point grid")->excludes("--pf-grid");
    app.add_option("--samples", samples, "Monte Carlo samples / trials");
    app.add_option("--seed", seed, "Monte Carlo seed");
    app.add_option("--workers", workers, "worker threads, 0 = all cores");
    app.add_option("--out", out, "output CSV path, '-' for stdout");
  }

  [[nodiscard]] nrsense::Scenario resolve() const {
    nrsense::Scenario s = config ? nrsense::load_scenario(*config) : nrsense::Scenario{};
    if (users) {
      if (*users < 1) throw nrsense::InputError("--users must be >= 1");
      if (s.users.empty()) s.users.emplace_back();
      s.users.resize(static_cast<std::size_t>(*users), s.users.back());
    }
    for (auto& user : s.users) {
      if (n) user.n = *n;
      if (snr_db) user.snr_db = *snr_db;
      if (u) user.u = *u;
      if (L) user.L = *L;
      if (pe) user.pe = *pe;
    }
    if (k) s.k = *k;
    if (methods) s.methods = nrsense::split_list(*methods);
    if (pf_grid) s.pf_grid = nrsense::GridSpec::parse(*pf_grid);
    if (pf) s.pf_grid = nrsense::GridSpec{*pf, *pf, 1};
    if (samples) s.samples = *samples;
    if (seed) s.seed = *seed;
    if (workers) s.workers = *workers;
    if (out) s.out = *out;
    s.validate();
    return s;
  }
};

void print_value(double value) { std::cout << nrsense::format_double(value) << '\n'; }

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-detector cooperative sensing over cascaded Rayleigh channels"};
  app.set_version_flag("--version", nrsense::kVersion);
  app.require_subcommand(1);

  ScenarioFlags roc_flags;
  auto* roc = app.add_subcommand("roc", "complementary ROC curves as CSV");
  roc_flags.attach(*roc);

  ScenarioFlags mc_flags;
  auto* mc = app.add_subcommand("mc", "end-to-end network simulation over the grid");
  mc_flags.attach(*mc);

  auto* validate = app.add_subcommand("validate", "run oracle and acceptance checks");
  std::string checks;
  nrsense::ValidationOptions vopts;
  validate->add_option("--check", checks, "comma list of check ids (default: all)");
  validate->add_option("--n", vopts.n, "restrict channel checks to one cascade order");
  validate->add_option("--L", vopts.L, "branch count for the mrc report");
  validate->add_option("--samples", vopts.samples, "Monte Carlo samples");
  validate->add_option("--seed", vopts.seed, "Monte Carlo seed");
  validate->add_option("--workers", vopts.workers, "worker threads, 0 = all cores");
  validate->add_option("--k", vopts.k, "series truncation order");
  bool list = false;
  validate->add_flag("--list", list, "list check ids and exit");

  auto* threshold = app.add_subcommand("threshold", "energy threshold for a false-alarm target");
  double th_u = 0.0;
  double th_pf = 0.0;
  threshold->add_option("--u", th_u, "time-bandwidth product")->required();
  threshold->add_option("--pf", th_pf, "false-alarm probability")->required();

  auto* pd = app.add_subcommand("pd", "detection probability at one point");
  double pd_u = 0.0;
  std::optional<double> pd_lambda;
  std::optional<double> pd_pf;
  std::optional<double> pd_snr;
  std::optional<double> pd_snr_db;
  int pd_n = 1;
  int pd_L = 1;
  int pd_k = 500;
  std::string pd_method = "quadrature";
  std::uint64_t pd_samples = 1'000'000;
  std::uint64_t pd_seed = 1;
  unsigned pd_workers = 0;
  bool awgn = false;
  pd->add_option("--u", pd_u, "time-bandwidth product")->required();
  auto* lambda_opt = pd->add_option("--lambda", pd_lambda, "energy threshold");
  pd->add_option("--pf", pd_pf, "false-alarm target (sets the threshold)")->excludes(lambda_opt);
  auto* snr_opt = pd->add_option("--snr", pd_snr, "linear SNR (AWGN) or scale SNR (fading)");
  pd->add_option("--snr-db", pd_snr_db, "scale SNR in dB")->excludes(snr_opt);
  pd->add_option("--n", pd_n, "cascade order");
  pd->add_option("--L", pd_L, "MRC branches");
  pd->add_option("--k", pd_k, "series truncation order");
  pd->add_option("--method", pd_method, "series, quadrature or monte_carlo");
  pd->add_option("--samples", pd_samples, "Monte Carlo samples");
  pd->add_option("--seed", pd_seed, "Monte Carlo seed");
  pd->add_option("--workers", pd_workers, "worker threads, 0 = all cores");
  pd->add_flag("--awgn", awgn, "no fading: exact Marcum Q at the given SNR");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*roc) {
      const nrsense::Scenario s = roc_flags.resolve();
      nrsense::write_outputs(s, "roc", nrsense::roc_csv(s), std::cout);
    } else if (*mc) {
      const nrsense::Scenario s = mc_flags.resolve();
      nrsense::write_outputs(s, "mc", nrsense::mc_csv(s), std::cout);
    } else if (*validate) {
      if (list) {
        for (const auto& info : nrsense::check_catalog()) std::cout << info.id << "  " << info.title << '\n';
        return kOk;
      }
      std::vector<std::string> ids = nrsense::split_list(checks);
      if (ids.empty()) {
        for (const auto& info : nrsense::check_catalog()) ids.push_back(info.id);
      }
      std::vector<nrsense::CheckResult> results;
      bool ok = true;
      for (const auto& id : ids) {
        results.push_back(nrsense::run_check(id, vopts));
        std::cout << nrsense::format_report({results.back()}) << std::flush;
        ok = ok && (results.back().passed || !results.back().asserted);
      }
      return ok ? kOk : kValidation;
    } else if (*threshold) {
      print_value(nrsense::threshold_for_pf(th_u, th_pf));
    } else if (*pd) {
      if (!pd_lambda && !pd_pf) throw nrsense::InputError("pd needs --lambda or --pf");
      const double lambda = pd_lambda ? *pd_lambda : nrsense::threshold_for_pf(pd_u, *pd_pf);
      const nrsense::DetectorParams params{pd_u, lambda};
      if (awgn) {
        if (!pd_snr) throw nrsense::InputError("pd --awgn needs --snr");
        print_value(nrsense::pd_awgn(params, *pd_snr));
      } else {
        if (!pd_snr && !pd_snr_db) throw nrsense::InputError("pd needs --snr or --snr-db");
        const nrsense::ChannelSpec spec =
            pd_snr ? nrsense::ChannelSpec{pd_n, *pd_snr, pd_L} : nrsense::ChannelSpec::from_db(pd_n, *pd_snr_db, pd_L);
        nrsense::Scenario s;
        s.k = pd_k;
        s.samples = pd_samples;
        s.seed = pd_seed;
        s.workers = pd_workers;
        const nrsense::Estimate e = nrsense::avg_pd(params, spec, s.method(pd_method));
        std::cout << nrsense::format_double(e.value);
        if (e.std_error > 0.0) std::cout << ' ' << nrsense::format_double(e.std_error);
        std::cout << '\n';
      }
    }
  } catch (const nrsense::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const nrsense::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  }
  return kOk;
}
