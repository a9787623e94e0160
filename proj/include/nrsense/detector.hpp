#pragma once

// Single-user energy detection: AWGN false-alarm / detection probabilities
// and the detection probability averaged over the fitted cascaded-fading law.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "nrsense/channel.hpp"
#include "nrsense/specfun.hpp"

namespace nrsense {

struct DetectorParams {
  double u = 1.0;      // time-bandwidth product
  double lambda = 0.0; // energy threshold

  void validate() const;
};

/// Finite-series route: the approximation of order k averaged term by term.
struct SeriesMethod {
  ApproxOrder order{500};
  bool operator==(const SeriesMethod&) const = default;
};

/// Adaptive Gauss-Kronrod integration of the exact AWGN detection
/// probability against the fitted density.
struct QuadratureMethod {
  double abs_tol = 1e-8;
  int max_subdivisions = 4000;
  bool operator==(const QuadratureMethod&) const = default;
};

/// Mean of the exact AWGN detection probability over exact cascade draws.
struct MonteCarloMethod {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  bool operator==(const MonteCarloMethod&) const = default;
};

using AvgPdMethod = std::variant<SeriesMethod, QuadratureMethod, MonteCarloMethod>;

/// "series", "quadrature" or "monte_carlo".
std::string method_label(const AvgPdMethod& method);

/// A probability with its Monte Carlo standard error (zero for analytic paths).
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// P_f = Q(u, lambda/2).
double false_alarm(const DetectorParams& params);

/// Threshold lambda with false_alarm == pf_target, pf_target in (0, 1].
double threshold_for_pf(double u, double pf_target);

/// P_d = Q_u(sqrt(2 gamma), sqrt(lambda)).
double pd_awgn(const DetectorParams& params, double gamma);

/// ln of I(a) = int_0^inf g^(a-1) e^-g e^(-beta g^(1/n)) dg = Gamma(a) E[e^(-beta G^(1/n))],
/// G ~ Gamma(a, 1). Requires n*a > 1.
double log_fading_moment_integral(double a, double beta, int n);

/// Averages detection probabilities for one channel. Work that does not
/// depend on the threshold (series moments) is done once at construction,
/// so a threshold sweep reuses it. Const member functions are thread-safe.
class DetectionAverager {
public:
  DetectionAverager(const ChannelSpec& spec, AvgPdMethod method);

  [[nodiscard]] Estimate pd(const DetectorParams& params) const;
  [[nodiscard]] Estimate pm(const DetectorParams& params) const;

  [[nodiscard]] const ChannelSpec& channel() const noexcept { return spec_; }
  [[nodiscard]] const AvgPdMethod& method() const noexcept { return method_; }

  /// ln E[g^l e^-g] under the fitted law, l = 0..k (series method only).
  [[nodiscard]] const std::vector<double>& log_moments() const noexcept { return log_moments_; }

private:
  Estimate series_pd(const DetectorParams& params, const SeriesMethod& method) const;
  Estimate quadrature_pd(const DetectorParams& params, const QuadratureMethod& method) const;
  Estimate monte_carlo_pd(const DetectorParams& params, const MonteCarloMethod& method) const;

  ChannelSpec spec_;
  AvgPdMethod method_;
  FitParams fit_;
  std::vector<double> log_weights_;
  std::vector<double> log_moments_;
};

Estimate avg_pd(const DetectorParams& params, const ChannelSpec& spec, const AvgPdMethod& method);

/// 1 - avg_pd, clamped to [0, 1].
Estimate avg_pm(const DetectorParams& params, const ChannelSpec& spec, const AvgPdMethod& method);

} // namespace nrsense
