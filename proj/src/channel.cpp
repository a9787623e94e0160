#include "nrsense/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "nrsense/errors.hpp"
#include "nrsense/specfun.hpp"

namespace nrsense {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

ChannelSpec ChannelSpec::from_db(int n, double snr_db, int L) {
  ChannelSpec spec{n, db_to_linear(snr_db), L};
  spec.validate();
  return spec;
}

void ChannelSpec::validate() const {
  if (n < 1) throw DomainError("cascade order n must be >= 1, got " + std::to_string(n));
  if (!(gamma_bar > 0.0) || !std::isfinite(gamma_bar)) throw DomainError("gamma_bar must be finite and > 0");
  if (L < 1) throw DomainError("branch count L must be >= 1, got " + std::to_string(L));
}

double fitted_shape(int n) { return 0.6102 * n + 0.4263; }

double fitted_spread(int n) { return 0.8808 * std::pow(static_cast<double>(n), -0.9661) + 1.12; }

FitParams fit_params(const ChannelSpec& spec) {
  spec.validate();
  const double n = spec.n;
  const double m = spec.L * fitted_shape(spec.n);
  const double omega = fitted_spread(spec.n);
  const double gamma_bar = spec.L * spec.gamma_bar;
  return FitParams{m, omega, m / n, m / (omega * std::pow(gamma_bar, 1.0 / n))};
}

double approx_snr_pdf(double gamma, const ChannelSpec& spec) {
  if (!(gamma >= 0.0)) throw DomainError("approx_snr_pdf requires gamma >= 0");
  const FitParams fp = fit_params(spec);
  const double n = spec.n;
  if (gamma == 0.0) {
    if (fp.alpha < 1.0) return std::numeric_limits<double>::infinity();
    if (fp.alpha > 1.0) return 0.0;
    return std::exp(fp.m * std::log(fp.beta) - std::log(n) - ln_gamma(fp.m));
  }
  if (std::isinf(gamma)) return 0.0;
  const double log_pdf = fp.m * std::log(fp.beta) + (fp.alpha - 1.0) * std::log(gamma) -
                         fp.beta * std::pow(gamma, 1.0 / n) - std::log(n) - ln_gamma(fp.m);
  return std::exp(log_pdf);
}

double approx_snr_cdf(double gamma, const ChannelSpec& spec) {
  if (!(gamma >= 0.0)) throw DomainError("approx_snr_cdf requires gamma >= 0");
  const FitParams fp = fit_params(spec);
  if (std::isinf(gamma)) return 1.0;
  return reg_lower_gamma(fp.m, fp.beta * std::pow(gamma, 1.0 / spec.n));
}

double approx_snr_mean(const ChannelSpec& spec) {
  const FitParams fp = fit_params(spec);
  const double n = spec.n;
  const double gamma_bar = spec.L * spec.gamma_bar;
  return gamma_bar * std::exp(n * std::log(fp.omega) + ln_gamma(fp.m + n) - ln_gamma(fp.m) -
                              n * std::log(fp.m));
}

double exact_snr_mean(const ChannelSpec& spec) {
  spec.validate();
  return spec.L * spec.gamma_bar * std::pow(2.0, spec.n);
}

double sample_cascade_snr(const ChannelSpec& spec, RandomStream& stream) {
  // r^2 of a unit-scale Rayleigh amplitude is exponential with mean 2.
  double total = 0.0;
  for (int r = 0; r < spec.L; ++r) {
    double product = spec.gamma_bar;
    for (int j = 0; j < spec.n; ++j) product *= stream.exponential(2.0);
    total += product;
  }
  return total;
}

double sample_fitted_snr(const ChannelSpec& spec, RandomStream& stream) {
  const FitParams fp = fit_params(spec);
  // t = beta g^(1/n) is Gamma(m, 1); invert its upper tail at a uniform draw.
  const double t = inv_reg_upper_gamma(fp.m, stream.uniform());
  return std::pow(t / fp.beta, static_cast<double>(spec.n));
}

double ks_statistic(std::span<double> samples, const ChannelSpec& spec) {
  if (samples.empty()) throw DomainError("ks_statistic needs at least one sample");
  std::sort(samples.begin(), samples.end());
  const double count = static_cast<double>(samples.size());
  double distance = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = approx_snr_cdf(samples[i], spec);
    const double below = static_cast<double>(i) / count;
    const double above = static_cast<double>(i + 1) / count;
    distance = std::max({distance, f - below, above - f});
  }
  return distance;
}

double ks_distance(const ChannelSpec& spec, std::uint64_t num_samples, RandomStream& stream) {
  spec.validate();
  if (num_samples < 10'000) throw DomainError("ks_distance needs at least 1e4 samples");
  std::vector<double> samples(num_samples);
  for (auto& s : samples) s = sample_cascade_snr(spec, stream);
  return ks_statistic(samples, spec);
}

} // namespace nrsense
