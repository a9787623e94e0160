#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace nrsense {

/// Kahan-Babuska-Neumaier accumulator. Unlike plain Kahan it stays accurate
/// when an added term is larger in magnitude than the running sum.
class CompensatedSum {
public:
  CompensatedSum& operator+=(double value) noexcept {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  [[nodiscard]] double value() const noexcept { return sum_ + compensation_; }

private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Sums exp(log_terms[i]) for nonnegative terms given in log domain. Terms are
/// scaled by the largest one and accumulated smallest first. Returns the log
/// of the sum; -inf for an empty input or all-zero terms.
inline double log_sum_exp(std::span<const double> log_terms) {
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  if (log_terms.empty()) return neg_inf;
  const double peak = *std::max_element(log_terms.begin(), log_terms.end());
  if (peak == neg_inf) return neg_inf;

  std::vector<double> scaled;
  scaled.reserve(log_terms.size());
  for (double lt : log_terms) scaled.push_back(std::exp(lt - peak));
  std::sort(scaled.begin(), scaled.end());

  CompensatedSum acc;
  for (double s : scaled) acc += s;
  return peak + std::log(acc.value());
}

} // namespace nrsense
