#pragma once

// Monte Carlo ground truth: the energy detector's test statistic simulated
// directly, and end-to-end OR-rule networks with Bernoulli reporting flips.

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "nrsense/channel.hpp"
#include "nrsense/detector.hpp"
#include "nrsense/fusion.hpp"
#include "nrsense/random.hpp"

namespace nrsense {

enum class Hypothesis { H0, H1 };

/// Empirical rate of an event over Bernoulli trials.
struct SimReport {
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t seed = 0;

  static SimReport from_counts(std::uint64_t trials, std::uint64_t hits, std::uint64_t seed);
};

/// Fixed SNR, or a fresh exact-cascade draw per trial.
using SnrSource = std::variant<double, ChannelSpec>;

struct DetectorSim {
  SimReport pf;
  SimReport pd;
};

/// Sum of 2u squared unit-variance normals; under H1 the first has mean sqrt(2 gamma).
double sample_test_statistic(int u, double gamma, Hypothesis hyp, RandomStream& stream);

/// Empirical exceedance rates of the statistic over params.lambda under H0 and H1.
DetectorSim simulate_detector(const DetectorParams& params, const SnrSource& source, std::uint64_t trials,
                              std::uint64_t seed, unsigned workers = 0);

/// Same draws tested against every threshold (common random numbers), so the
/// rates are monotone in lambda for any sample size.
std::vector<DetectorSim> simulate_detector_sweep(double u, std::span<const double> lambdas,
                                                 const SnrSource& source, std::uint64_t trials,
                                                 std::uint64_t seed, unsigned workers = 0);

struct CssSim {
  SimReport q_f;
  SimReport q_m;
  std::vector<SimReport> local_pf; // per-user rates before reporting flips
  std::vector<SimReport> local_pm;
};

/// One trial is a full sensing and reporting round under each hypothesis.
/// With one user and p_e = 0 the rates equal simulate_detector's exactly.
CssSim simulate_css(const FusionNetwork& network, std::uint64_t trials, std::uint64_t seed,
                    unsigned workers = 0);

} // namespace nrsense
