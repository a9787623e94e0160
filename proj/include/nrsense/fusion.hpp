#pragma once

// OR-rule cooperative sensing: global false-alarm and missed-detection
// probabilities over M users with noisy reporting links, and ROC sweeps.

#include <span>
#include <string>
#include <vector>

#include "nrsense/channel.hpp"
#include "nrsense/detector.hpp"

namespace nrsense {

struct CRUserProfile {
  ChannelSpec channel;
  DetectorParams detector;
  double p_e = 0.0; // reporting bit-flip probability, [0, 0.5]
  AvgPdMethod method = QuadratureMethod{};

  void validate() const;
};

struct FusionNetwork {
  std::vector<CRUserProfile> users;

  void validate() const;
  [[nodiscard]] std::vector<double> reporting_errors() const;
};

/// Q_f = 1 - prod[(1 - pf_i)(1 - pe_i) + pf_i pe_i].
double global_qf(std::span<const double> pf, std::span<const double> pe);

/// Q_m = prod[pm_i (1 - pe_i) + (1 - pm_i) pe_i].
double global_qm(std::span<const double> pm, std::span<const double> pe);

struct RocPoint {
  double pf_target;
  double q_f;
  double q_m;
  double q_d;
  std::vector<double> lambdas;
  std::string method;
};

struct RocCurve {
  std::vector<RocPoint> points;
};

/// `count` log-spaced values from lo to hi inclusive (0 < lo <= hi).
std::vector<double> log_grid(double lo, double hi, int count);

/// For each per-user false-alarm target: per-user thresholds from
/// threshold_for_pf, per-user missed detection from that user's averaging
/// method, then the OR-rule globals. pf_grid must be strictly increasing in
/// (0, 1]. Output order follows the grid for any worker count.
RocCurve roc_sweep(const FusionNetwork& network, std::span<const double> pf_grid, unsigned workers = 0);

} // namespace nrsense
