#include "nrsense/fusion.hpp"

#include <cmath>
#include <cstddef>
#include <memory>
#include <string>

#include "nrsense/errors.hpp"
#include "nrsense/parallel.hpp"

namespace nrsense {

namespace {

void check_lists(std::span<const double> p, std::span<const double> pe, const char* name) {
  if (p.size() != pe.size()) {
    throw DomainError(std::string(name) + ": " + std::to_string(p.size()) + " probabilities but " +
                      std::to_string(pe.size()) + " reporting errors");
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0 && p[i] <= 1.0) || !(pe[i] >= 0.0 && pe[i] <= 1.0)) {
      throw DomainError(std::string(name) + ": entry " + std::to_string(i) + " is not a probability");
    }
  }
}

} // namespace

void CRUserProfile::validate() const {
  channel.validate();
  detector.validate();
  if (!(p_e >= 0.0 && p_e <= 0.5)) throw DomainError("reporting error p_e must lie in [0, 0.5]");
}

void FusionNetwork::validate() const {
  if (users.empty()) throw DomainError("network needs at least one user");
  for (const auto& user : users) user.validate();
}

std::vector<double> FusionNetwork::reporting_errors() const {
  std::vector<double> pe;
  pe.reserve(users.size());
  for (const auto& user : users) pe.push_back(user.p_e);
  return pe;
}

double global_qf(std::span<const double> pf, std::span<const double> pe) {
  check_lists(pf, pe, "global_qf");
  double silent = 1.0;
  for (std::size_t i = 0; i < pf.size(); ++i) {
    silent *= (1.0 - pf[i]) * (1.0 - pe[i]) + pf[i] * pe[i];
  }
  return 1.0 - silent;
}

double global_qm(std::span<const double> pm, std::span<const double> pe) {
  check_lists(pm, pe, "global_qm");
  double missed = 1.0;
  for (std::size_t i = 0; i < pm.size(); ++i) {
    missed *= pm[i] * (1.0 - pe[i]) + (1.0 - pm[i]) * pe[i];
  }
  return missed;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw DomainError("log_grid: need 0 < lo <= hi and count >= 1");
  if (count == 1) return {lo};
  std::vector<double> grid(static_cast<std::size_t>(count));
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) grid[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

RocCurve roc_sweep(const FusionNetwork& network, std::span<const double> pf_grid, unsigned workers) {
  network.validate();
  if (pf_grid.empty()) throw DomainError("roc_sweep: empty false-alarm grid");
  for (std::size_t i = 0; i < pf_grid.size(); ++i) {
    if (!(pf_grid[i] > 0.0 && pf_grid[i] <= 1.0)) throw DomainError("roc_sweep: grid entries must lie in (0, 1]");
    if (i > 0 && !(pf_grid[i] > pf_grid[i - 1])) throw DomainError("roc_sweep: grid must be strictly increasing");
  }

  // Users sharing a channel and method share one averager. Work is spread
  // over (point, user) pairs, so Monte Carlo averagers run single-threaded.
  const std::size_t M = network.users.size();
  std::vector<std::shared_ptr<const DetectionAverager>> averagers(M);
  for (std::size_t i = 0; i < M; ++i) {
    const auto& user = network.users[i];
    for (std::size_t j = 0; j < i; ++j) {
      const auto& other = network.users[j];
      if (other.channel == user.channel && other.method == user.method) {
        averagers[i] = averagers[j];
        break;
      }
    }
    if (!averagers[i]) {
      AvgPdMethod method = user.method;
      if (auto* mc = std::get_if<MonteCarloMethod>(&method)) mc->workers = 1;
      averagers[i] = std::make_shared<const DetectionAverager>(user.channel, method);
    }
  }

  const std::size_t P = pf_grid.size();
  std::vector<double> lambdas(P * M);
  std::vector<double> pf(P * M);
  std::vector<double> pm(P * M);
  parallel_for(P * M, workers, [&](std::size_t idx) {
    const std::size_t p = idx / M;
    const std::size_t i = idx % M;
    DetectorParams params = network.users[i].detector;
    params.lambda = threshold_for_pf(params.u, pf_grid[p]);
    lambdas[idx] = params.lambda;
    pf[idx] = false_alarm(params);
    pm[idx] = averagers[i]->pm(params).value;
  });

  const std::vector<double> pe = network.reporting_errors();
  const std::string label = method_label(network.users.front().method);
  RocCurve curve;
  curve.points.reserve(P);
  for (std::size_t p = 0; p < P; ++p) {
    const std::span<const double> pf_row(pf.data() + p * M, M);
    const std::span<const double> pm_row(pm.data() + p * M, M);
    RocPoint point;
    point.pf_target = pf_grid[p];
    point.q_f = global_qf(pf_row, pe);
    point.q_m = global_qm(pm_row, pe);
    point.q_d = 1.0 - point.q_m;
    point.lambdas.assign(lambdas.begin() + static_cast<std::ptrdiff_t>(p * M),
                         lambdas.begin() + static_cast<std::ptrdiff_t>((p + 1) * M));
    point.method = label;
    curve.points.push_back(std::move(point));
  }
  return curve;
}

} // namespace nrsense
