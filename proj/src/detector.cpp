#include "nrsense/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "nrsense/errors.hpp"
#include "nrsense/parallel.hpp"
#include "nrsense/quadrature.hpp"
#include "nrsense/random.hpp"
#include "nrsense/summation.hpp"

namespace nrsense {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Relative accuracy of each fading-moment integral. The series sums ~k of
// them, so this sits well below the 1e-8 budget of the quadrature route.
constexpr double kMomentRelTol = 1e-13;

// Upper-tail mass of the Gamma(m) weight discarded by the quadrature route.
constexpr double kWeightTail = 1e-16;

} // namespace

void DetectorParams::validate() const {
  if (!(u >= 1.0) || !std::isfinite(u)) throw DomainError("time-bandwidth product u must be >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("threshold lambda must be finite and >= 0");
}

std::string method_label(const AvgPdMethod& method) {
  return std::visit(overloaded{[](const SeriesMethod&) { return std::string("series"); },
                               [](const QuadratureMethod&) { return std::string("quadrature"); },
                               [](const MonteCarloMethod&) { return std::string("monte_carlo"); }},
                    method);
}

double false_alarm(const DetectorParams& params) {
  params.validate();
  return reg_upper_gamma(params.u, 0.5 * params.lambda);
}

double threshold_for_pf(double u, double pf_target) {
  if (!(pf_target > 0.0 && pf_target <= 1.0)) {
    throw DomainError("target false-alarm probability must lie in (0, 1], got " + std::to_string(pf_target));
  }
  DetectorParams{u, 0.0}.validate();
  return 2.0 * inv_reg_upper_gamma(u, pf_target);
}

double pd_awgn(const DetectorParams& params, double gamma) {
  params.validate();
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("SNR must be finite and >= 0");
  return marcum_q_half_squares(params.u, gamma, 0.5 * params.lambda);
}

double log_fading_moment_integral(double a, double beta, int n) {
  if (!(a > 0.0) || !(beta > 0.0) || n < 1) throw DomainError("log_fading_moment_integral: bad arguments");
  const double nd = n;
  const double c = nd * a - 1.0;
  if (!(c > 0.0)) throw DomainError("log_fading_moment_integral requires n*a > 1");

  // With g = s^n: I(a) = n int_0^inf s^(na-1) e^(-s^n - beta s) ds. The log
  // integrand phi is strictly concave, so it has a single peak.
  auto phi = [&](double s) { return c * std::log(s) - std::pow(s, nd) - beta * s; };
  auto slope = [&](double s) { return c / s - nd * std::pow(s, nd - 1.0) - beta; };

  double hi = std::min(c / beta, std::pow(c / nd, 1.0 / nd));
  double lo = hi * 1e-8;
  while (slope(lo) <= 0.0) lo *= 1e-8;
  for (int i = 0; i < 200 && hi / lo > 1.0 + 1e-15; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (slope(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double peak = std::sqrt(lo * hi);
  const double phi_peak = phi(peak);

  // Support where the integrand is within e^-60 of its peak.
  constexpr double kDrop = 60.0;
  double right = peak * 2.0;
  while (phi(right) - phi_peak > -kDrop) right *= 2.0;
  double left = peak * 0.5;
  while (left > peak * 1e-12 && phi(left) - phi_peak > -kDrop) left *= 0.5;
  if (left <= peak * 1e-12) left = 0.0;

  auto integrand = [&](double s) { return s > 0.0 ? std::exp(phi(s) - phi_peak) : 0.0; };
  QuadratureOptions opts;
  opts.abs_tol = 0.0;
  opts.rel_tol = kMomentRelTol;
  opts.max_subdivisions = 2000;
  const QuadratureResult below = integrate_adaptive(integrand, left, peak, opts);
  const QuadratureResult above = integrate_adaptive(integrand, peak, right, opts);
  if (!below.converged || !above.converged) {
    throw NumericError("log_fading_moment_integral: quadrature did not converge");
  }
  return std::log(nd) + phi_peak + std::log(below.value + above.value);
}

DetectionAverager::DetectionAverager(const ChannelSpec& spec, AvgPdMethod method)
    : spec_{spec}, method_{std::move(method)}, fit_{fit_params(spec)} {
  if (const auto* series = std::get_if<SeriesMethod>(&method_)) {
    const int k = series->order.value();
    log_weights_ = approx_log_weights(series->order);
    // E[g^l e^-g] = beta^m / (n Gamma(m)) I(alpha + l)
    const double log_norm = fit_.m * std::log(fit_.beta) - std::log(static_cast<double>(spec_.n)) -
                            ln_gamma(fit_.m);
    log_moments_.resize(static_cast<std::size_t>(k) + 1);
    for (int l = 0; l <= k; ++l) {
      log_moments_[static_cast<std::size_t>(l)] =
          log_norm + log_fading_moment_integral(fit_.alpha + l, fit_.beta, spec_.n);
    }
  } else if (const auto* mc = std::get_if<MonteCarloMethod>(&method_)) {
    if (mc->samples < 1000) throw DomainError("monte_carlo averaging needs at least 1000 samples");
  }
}

Estimate DetectionAverager::pd(const DetectorParams& params) const {
  params.validate();
  return std::visit(
      overloaded{[&](const SeriesMethod& m) { return series_pd(params, m); },
                 [&](const QuadratureMethod& m) { return quadrature_pd(params, m); },
                 [&](const MonteCarloMethod& m) { return monte_carlo_pd(params, m); }},
      method_);
}

Estimate DetectionAverager::pm(const DetectorParams& params) const {
  const Estimate d = pd(params);
  return {detail::clamp_probability(1.0 - d.value, "avg_pm"), d.std_error};
}

Estimate DetectionAverager::series_pd(const DetectorParams& params, const SeriesMethod& method) const {
  const int k = method.order.value();
  const std::vector<double> q = reg_upper_gamma_ladder(params.u, 0.5 * params.lambda, k + 1);
  std::vector<double> log_terms;
  log_terms.reserve(static_cast<std::size_t>(k) + 1);
  for (int l = 0; l <= k; ++l) {
    const auto i = static_cast<std::size_t>(l);
    if (q[i] <= 0.0) continue;
    log_terms.push_back(log_weights_[i] + std::log(q[i]) + log_moments_[i]);
  }
  const double log_total = log_sum_exp(log_terms);
  if (log_total > std::log(std::numeric_limits<double>::max())) {
    throw NumericError("series average overflows");
  }
  return {detail::clamp_probability(std::exp(log_total), "avg_pd(series)"), 0.0};
}

Estimate DetectionAverager::quadrature_pd(const DetectorParams& params,
                                          const QuadratureMethod& method) const {
  // With t = g^(1/n), beta t is Gamma(m, 1) distributed under the fitted law,
  // which removes the density singularity at g = 0.
  const double m = fit_.m;
  const double log_gamma_m = ln_gamma(m);
  const double x = 0.5 * params.lambda;
  const double nd = spec_.n;
  auto weight = [&](double s) { return std::exp((m - 1.0) * std::log(s) - s - log_gamma_m); };
  auto detect = [&](double s) { return marcum_q_half_squares(params.u, std::pow(s / fit_.beta, nd), x); };

  const double upper = inv_reg_upper_gamma(m, kWeightTail);
  QuadratureOptions opts;
  opts.abs_tol = method.abs_tol;
  opts.rel_tol = 0.0;
  opts.initial_panels = 13; // 195 nodes before refinement
  opts.max_subdivisions = method.max_subdivisions;
  auto integrate = [&](auto&& f) {
    const QuadratureResult r = integrate_adaptive(f, 0.0, upper, opts);
    if (!r.converged) {
      throw NumericError("avg_pd(quadrature) did not reach abs_tol " + std::to_string(method.abs_tol));
    }
    return r.value;
  };

  // Kronrod weights are positive, so a nonnegative integrand never yields a
  // negative result. Integrating whichever of P_d, 1 - P_d is smaller keeps
  // the estimate inside [0, 1].
  const double pd = integrate([&](double s) { return s > 0.0 ? weight(s) * detect(s) : 0.0; });
  if (pd <= 0.5) return {detail::clamp_probability(pd, "avg_pd(quadrature)"), 0.0};
  const double pm = integrate([&](double s) { return s > 0.0 ? weight(s) * (1.0 - detect(s)) : 0.0; });
  return {detail::clamp_probability(1.0 - pm, "avg_pd(quadrature)"), 0.0};
}

Estimate DetectionAverager::monte_carlo_pd(const DetectorParams& params,
                                           const MonteCarloMethod& method) const {
  const std::uint64_t blocks = (method.samples + kTrialsPerBlock - 1) / kTrialsPerBlock;
  struct Partial {
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  std::vector<Partial> partials(blocks);
  const double x = 0.5 * params.lambda;

  parallel_for(blocks, method.workers, [&](std::size_t b) {
    RandomStream stream(method.seed, derive_stream(b, 0, StreamPurpose::fading_average));
    const std::uint64_t first = b * kTrialsPerBlock;
    const std::uint64_t count = std::min<std::uint64_t>(kTrialsPerBlock, method.samples - first);
    CompensatedSum sum;
    CompensatedSum sum_sq;
    for (std::uint64_t i = 0; i < count; ++i) {
      const double p = marcum_q_half_squares(params.u, sample_cascade_snr(spec_, stream), x);
      sum += p;
      sum_sq += p * p;
    }
    partials[b] = {sum.value(), sum_sq.value()};
  });

  CompensatedSum sum;
  CompensatedSum sum_sq;
  for (const auto& p : partials) {
    sum += p.sum;
    sum_sq += p.sum_sq;
  }
  const double n = static_cast<double>(method.samples);
  const double mean = sum.value() / n;
  const double variance = std::max(0.0, (sum_sq.value() / n - mean * mean) * n / (n - 1.0));
  return {detail::clamp_probability(mean, "avg_pd(monte_carlo)"), std::sqrt(variance / n)};
}

Estimate avg_pd(const DetectorParams& params, const ChannelSpec& spec, const AvgPdMethod& method) {
  return DetectionAverager(spec, method).pd(params);
}

Estimate avg_pm(const DetectorParams& params, const ChannelSpec& spec, const AvgPdMethod& method) {
  return DetectionAverager(spec, method).pm(params);
}

} // namespace nrsense
