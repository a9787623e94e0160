#pragma once

// Cascaded n*Rayleigh sensing channel: the transformed-Nakagami fit to the
// SNR law, its MRC extension, and exact sampling of the cascade.

#include <cstdint>
#include <span>

#include "nrsense/random.hpp"

namespace nrsense {

double db_to_linear(double db);
double linear_to_db(double linear);

/// One sensing channel. gamma_bar is the linear scale SNR: every Rayleigh
/// factor of the cascade has unit scale (second moment 2), so the mean
/// per-branch SNR is gamma_bar * 2^n.
struct ChannelSpec {
  int n = 1;
  double gamma_bar = 1.0;
  int L = 1;

  static ChannelSpec from_db(int n, double snr_db, int L = 1);
  void validate() const;

  bool operator==(const ChannelSpec&) const = default;
};

/// Parameters of the fitted SNR law f(g) = beta^m g^(alpha-1) e^(-beta g^(1/n)) / (n Gamma(m)).
struct FitParams {
  double m;
  double omega;
  double alpha;
  double beta;
};

/// Shape fit m(n) = 0.6102 n + 0.4263.
double fitted_shape(int n);
/// Spread fit Omega(n) = 0.8808 n^-0.9661 + 1.12.
double fitted_spread(int n);

/// Fitted parameters, with the MRC substitution m -> L m, gamma_bar -> L gamma_bar
/// applied when L > 1.
FitParams fit_params(const ChannelSpec& spec);

/// Fitted SNR density. Returns +infinity at g = 0 when alpha < 1.
double approx_snr_pdf(double gamma, const ChannelSpec& spec);

/// Fitted SNR distribution function, P(m, beta g^(1/n)).
double approx_snr_cdf(double gamma, const ChannelSpec& spec);

/// Closed-form mean of the fitted law: gamma_bar_e Omega^n Gamma(m_e+n) / (Gamma(m_e) m_e^n).
double approx_snr_mean(const ChannelSpec& spec);

/// Mean of the exact combiner SNR, L * gamma_bar * 2^n.
double exact_snr_mean(const ChannelSpec& spec);

/// One draw of the exact combiner SNR: sum over L branches of
/// gamma_bar * prod_{j=1}^{n} r_j^2 with unit-scale Rayleigh r_j.
double sample_cascade_snr(const ChannelSpec& spec, RandomStream& stream);

/// One draw from the fitted law by inverse transform.
double sample_fitted_snr(const ChannelSpec& spec, RandomStream& stream);

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples`
/// (sorted in place) and the fitted CDF.
double ks_statistic(std::span<double> samples, const ChannelSpec& spec);

/// KS distance between num_samples exact cascade draws and the fitted CDF.
double ks_distance(const ChannelSpec& spec, std::uint64_t num_samples, RandomStream& stream);

} // namespace nrsense
