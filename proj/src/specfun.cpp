#include "nrsense/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <string>

#include "nrsense/errors.hpp"
#include "nrsense/summation.hpp"

namespace nrsense {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min();
constexpr long kMaxGammaIterations = 1'000'000;

bool finite_nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }

} // namespace

ApproxOrder::ApproxOrder(int k) : k_{k} {
  if (k < 1) throw DomainError("approximation order k must be >= 1, got " + std::to_string(k));
}

void Tolerance::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw DomainError("rel_tol must lie in (0, 1)");
  if (max_terms < 1) throw DomainError("max_terms must be >= 1");
}

double ln_gamma(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError("ln_gamma requires a finite a > 0, got " + std::to_string(a));
  }
  // lgamma_r leaves the global signgam alone, so concurrent callers are safe.
  int sign = 0;
  return ::lgamma_r(a, &sign);
}

GammaPQ reg_gamma_pq(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a) || std::isnan(x) || x < 0.0) {
    throw DomainError("regularized incomplete gamma needs a > 0 and x >= 0");
  }
  if (x == 0.0) return {0.0, 1.0};
  if (std::isinf(x)) return {1.0, 0.0};

  const double log_prefix = a * std::log(x) - x - ln_gamma(a);

  if (x < a + 1.0) {
    // P(a, x) = x^a e^-x / Gamma(a) * sum_n x^n / (a (a+1) ... (a+n))
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    long n = 0;
    for (; n < kMaxGammaIterations; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (del < sum * kEps) break;
    }
    if (n == kMaxGammaIterations) throw NumericError("incomplete gamma series did not converge");
    const double p = std::min(1.0, std::exp(log_prefix + std::log(sum)));
    return {p, 1.0 - p};
  }

  // Modified Lentz evaluation of the continued fraction for Q(a, x).
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  long i = 1;
  for (; i < kMaxGammaIterations; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  if (i == kMaxGammaIterations) throw NumericError("incomplete gamma continued fraction did not converge");
  const double q = std::min(1.0, std::exp(log_prefix + std::log(h)));
  return {1.0 - q, q};
}

double reg_upper_gamma(double a, double x) { return reg_gamma_pq(a, x).q; }

double reg_lower_gamma(double a, double x) { return reg_gamma_pq(a, x).p; }

double inv_reg_upper_gamma(double a, double q) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("inv_reg_upper_gamma requires a > 0");
  if (!(q > 0.0 && q <= 1.0)) {
    throw DomainError("inv_reg_upper_gamma requires q in (0, 1], got " + std::to_string(q));
  }
  if (q == 1.0) return 0.0;

  // Work on whichever tail is small so the residual keeps relative accuracy.
  const bool upper_tail = q < 0.5;
  const double target = upper_tail ? q : 1.0 - q;
  const double log_target = std::log(target);
  const double lga = ln_gamma(a);

  // residual > 0 means x is left of the root.
  auto residual = [&](const GammaPQ& pq) { return upper_tail ? pq.q - q : (1.0 - q) - pq.p; };

  double lo = 0.0;
  double hi = std::max(1.0, a);
  while (residual(reg_gamma_pq(a, hi)) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericError("inv_reg_upper_gamma: could not bracket the root");
  }

  double x = (a > lo && a < hi) ? a : 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    const GammaPQ pq = reg_gamma_pq(a, x);
    const double r = residual(pq);
    if (r == 0.0) return x;
    if (r > 0.0) {
      lo = x;
    } else {
      hi = x;
    }

    // Newton on the log of the small tail.
    const double density = std::exp((a - 1.0) * std::log(x) - x - lga);
    double next = std::numeric_limits<double>::quiet_NaN();
    if (density > 0.0) {
      if (upper_tail && pq.q > 0.0) {
        next = x + (std::log(pq.q) - log_target) * pq.q / density;
      } else if (!upper_tail && pq.p > 0.0) {
        next = x - (std::log(pq.p) - log_target) * pq.p / density;
      }
    }
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);

    if (std::abs(next - x) <= 2.0 * kEps * x || hi - lo <= 2.0 * kEps * hi) return next;
    x = next;
  }
  return x;
}

std::vector<double> reg_upper_gamma_ladder(double a, double x, int count) {
  if (count < 1) throw DomainError("reg_upper_gamma_ladder needs count >= 1");
  std::vector<double> q(static_cast<std::size_t>(count));
  q[0] = reg_upper_gamma(a, x);
  if (x == 0.0) {
    std::fill(q.begin(), q.end(), 1.0);
    return q;
  }
  // Q(a+l+1, x) = Q(a+l, x) + x^(a+l) e^-x / Gamma(a+l+1); the increment is
  // carried in log domain so it cannot underflow before it matters.
  const double log_x = std::log(x);
  double log_d = a * log_x - x - ln_gamma(a + 1.0);
  for (int l = 1; l < count; ++l) {
    q[static_cast<std::size_t>(l)] = std::min(1.0, q[static_cast<std::size_t>(l - 1)] + std::exp(log_d));
    log_d += log_x - std::log(a + static_cast<double>(l));
  }
  return q;
}

double marcum_q(double u, double a, double b, const Tolerance& tol) {
  if (!finite_nonnegative(a) || !finite_nonnegative(b)) {
    throw DomainError("marcum_q requires finite nonnegative a and b");
  }
  return marcum_q_half_squares(u, 0.5 * a * a, 0.5 * b * b, tol);
}

double marcum_q_half_squares(double u, double mu, double x, const Tolerance& tol) {
  if (!(u >= 1.0) || !std::isfinite(u)) throw DomainError("marcum_q requires u >= 1");
  if (!finite_nonnegative(mu) || !finite_nonnegative(x)) {
    throw DomainError("marcum_q requires finite nonnegative arguments");
  }
  tol.validate();

  if (x == 0.0) return 1.0;
  if (mu == 0.0) return reg_upper_gamma(u, x);

  // Q_u = sum_j w_j Q(u+j, x) with Poisson(mu) weights w_j. Below the mean of
  // the statistic the complement 1 - Q_u = sum_j w_j P(u+j, x) is accumulated
  // instead, so that the summed quantity is always the small one.
  const bool complement = x < mu + u;

  // Start at the peak of w_j * x^(u+j) / Gamma(u+j+1); every factor needed
  // there is representable whenever the answer is.
  const double peak = 0.5 * (-u + std::sqrt(u * u + 4.0 * mu * x));
  const double start = std::floor(std::max(0.0, peak));

  const double log_mu = std::log(mu);
  const double w0 = std::exp(-mu + start * log_mu - ln_gamma(start + 1.0));
  const GammaPQ pq0 = reg_gamma_pq(u + start, x);
  const double f0 = complement ? pq0.p : pq0.q;
  // D_j = x^(u+j) e^-x / Gamma(u+j+1): Q(u+j+1, x) = Q(u+j, x) + D_j.
  const double d0 = std::exp((u + start) * std::log(x) - x - ln_gamma(u + start + 1.0));

  CompensatedSum sum;
  sum += w0 * f0;
  long terms = 1;

  auto converged = [&](double bound) {
    const double target = complement ? 1.0 - sum.value() : sum.value();
    return bound <= tol.rel_tol * target || bound < kTiny;
  };
  auto count_term = [&] {
    if (++terms > tol.max_terms) {
      throw NumericError("marcum_q: series exceeded " + std::to_string(tol.max_terms) + " terms");
    }
  };

  // Upward in j. Remaining Poisson mass beyond j+1 is bounded geometrically
  // once j+2 > mu.
  {
    double w = w0, f = f0, d = d0;
    for (double j = start;; j += 1.0) {
      const double f_next = complement ? std::max(0.0, f - d) : std::min(1.0, f + d);
      const double w_next = w * mu / (j + 1.0);
      const double mass = (j + 2.0 > mu) ? std::min(1.0, w_next / (1.0 - mu / (j + 2.0))) : 1.0;
      // f decreases with j for P and is at most 1 for Q.
      const double bound = complement ? f_next * mass : mass;
      if (converged(bound)) break;
      count_term();
      w = w_next;
      f = f_next;
      d *= x / (u + j + 1.0);
      sum += w * f;
    }
  }

  // Downward in j. Below the mode the Poisson mass of indices < j is bounded
  // by w_(j-1) / (1 - (j-1)/mu).
  {
    double w = w0, f = f0, d = d0;
    for (double j = start; j > 0.0; j -= 1.0) {
      const double d_prev = d * (u + j) / x;
      const double f_prev = complement ? std::min(1.0, f + d_prev) : std::max(0.0, f - d_prev);
      const double w_prev = w * j / mu;
      const double mass = (j - 1.0 < mu) ? std::min(1.0, w_prev / (1.0 - (j - 1.0) / mu)) : 1.0;
      // f decreases as j decreases for Q and is at most 1 for P.
      const double bound = complement ? mass : f_prev * mass;
      if (converged(bound)) break;
      count_term();
      w = w_prev;
      f = f_prev;
      d = d_prev;
      sum += w * f;
    }
  }

  const double s = sum.value();
  return detail::clamp_probability(complement ? 1.0 - s : s, "marcum_q");
}

std::vector<double> approx_log_weights(ApproxOrder order) {
  // Gamma(k+l) / Gamma(k-l+1) = k^(2l-1) prod_{i=1}^{l-1} (1 - i^2/k^2), so
  // the weight is prod_{i<l} (1 - (i/k)^2) / l!. The product form avoids
  // cancelling ln Gamma values of size ~ k ln k.
  const int k = order.value();
  const double kd = static_cast<double>(k);
  std::vector<double> log_w(static_cast<std::size_t>(k) + 1);
  double log_prod = 0.0;
  log_w[0] = 0.0;
  for (int l = 1; l <= k; ++l) {
    if (l >= 2) {
      const double r = static_cast<double>(l - 1) / kd;
      log_prod += std::log1p(-r * r);
    }
    log_w[static_cast<std::size_t>(l)] = log_prod - ln_gamma(static_cast<double>(l) + 1.0);
  }
  return log_w;
}

double pd_awgn_approx(ApproxOrder order, double u, double lambda, double gamma) {
  if (!(u >= 1.0) || !std::isfinite(u)) throw DomainError("pd_awgn_approx requires u >= 1");
  if (!finite_nonnegative(lambda) || !finite_nonnegative(gamma)) {
    throw DomainError("pd_awgn_approx requires finite lambda >= 0 and gamma >= 0");
  }

  const int k = order.value();
  const std::vector<double> log_w = approx_log_weights(order);
  const double x = 0.5 * lambda;

  const std::vector<double> q = reg_upper_gamma_ladder(u, x, k + 1);
  const double log_gamma = std::log(gamma);

  std::vector<double> log_terms;
  log_terms.reserve(static_cast<std::size_t>(k) + 1);
  for (int l = 0; l <= k; ++l) {
    if (l > 0 && gamma == 0.0) break;
    const double ql = q[static_cast<std::size_t>(l)];
    if (ql <= 0.0) continue;
    const double power = (l == 0) ? 0.0 : static_cast<double>(l) * log_gamma;
    const double lt = log_w[static_cast<std::size_t>(l)] + std::log(ql) + power - gamma;
    if (std::isnan(lt) || lt == std::numeric_limits<double>::infinity()) {
      throw NumericError("pd_awgn_approx: summand " + std::to_string(l) + " is not representable");
    }
    log_terms.push_back(lt);
  }

  const double log_total = log_sum_exp(log_terms);
  if (log_total > std::log(std::numeric_limits<double>::max())) {
    throw NumericError("pd_awgn_approx: sum overflows");
  }
  return detail::clamp_probability(std::exp(log_total), "pd_awgn_approx");
}

namespace detail {

double clamp_probability(double p, const char* where) {
  if (std::isnan(p)) throw NumericError(std::string(where) + ": result is NaN");
  if (p < -1e-9 || p > 1.0 + 1e-9) {
    std::cerr << "warning: " << where << " produced probability " << p
              << " outside [0, 1] beyond round-off\n";
  }
  return std::clamp(p, 0.0, 1.0);
}

} // namespace detail

} // namespace nrsense
