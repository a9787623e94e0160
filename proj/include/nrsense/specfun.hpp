#pragma once

// Scalar special functions behind the energy-detector probabilities:
// log-gamma, regularized incomplete gamma (and its inverse), the generalized
// Marcum Q function and its finite-series approximation.

#include <vector>

namespace nrsense {

/// Truncation order k of the finite-series Marcum Q approximation.
class ApproxOrder {
public:
  explicit ApproxOrder(int k);
  [[nodiscard]] int value() const noexcept { return k_; }
  bool operator==(const ApproxOrder&) const = default;

private:
  int k_;
};

/// Series truncation control.
struct Tolerance {
  double rel_tol = 1e-12;
  long max_terms = 100000;

  void validate() const;
};

/// ln Gamma(a) for a > 0.
double ln_gamma(double a);

/// Regularized lower and upper incomplete gamma functions evaluated together.
/// Whichever of the two is computed directly keeps full relative accuracy;
/// the other is its complement.
struct GammaPQ {
  double p;
  double q;
};
GammaPQ reg_gamma_pq(double a, double x);

/// Q(a, x) = Gamma(a, x) / Gamma(a).
double reg_upper_gamma(double a, double x);

/// P(a, x) = 1 - Q(a, x).
double reg_lower_gamma(double a, double x);

/// Q(a + l, x) for l = 0..count-1, by upward recurrence from Q(a, x).
std::vector<double> reg_upper_gamma_ladder(double a, double x, int count);

/// Solves Q(a, x) = q for x, q in (0, 1].
double inv_reg_upper_gamma(double a, double q);

/// Generalized Marcum Q function Q_u(a, b), u >= 1.
double marcum_q(double u, double a, double b, const Tolerance& tol = {});

/// Marcum Q parameterized by mu = a^2/2 and x = b^2/2. This is the form the
/// detector uses (mu = SNR, x = lambda/2); it avoids a square-root round trip.
double marcum_q_half_squares(double u, double mu, double x,
                             const Tolerance& tol = {});

/// log of the weight Gamma(k+l) k^(1-2l) / (Gamma(l+1) Gamma(k-l+1)) of the
/// finite-series approximation, for l = 0..k. Entry 0 is exactly zero.
std::vector<double> approx_log_weights(ApproxOrder order);

/// Finite-series approximation to Q_u(sqrt(2 gamma), sqrt(lambda)):
///   sum_{l=0}^{k} w_l Q(u+l, lambda/2) gamma^l e^(-gamma).
/// Terms are formed in log domain and accumulated with compensated
/// summation. Throws NumericError if the sum is not representable.
double pd_awgn_approx(ApproxOrder order, double u, double lambda, double gamma);

namespace detail {
/// Clamps a probability computed with round-off to [0, 1]; excursions larger
/// than 1e-9 are reported on stderr since they point at a defect.
double clamp_probability(double p, const char* where);
} // namespace detail

} // namespace nrsense
