#include "nrsense/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <tuple>
#include <utility>
#include <vector>

#include "nrsense/errors.hpp"
#include "nrsense/summation.hpp"

namespace nrsense {

namespace {

// Abscissae of the 15-point Kronrod rule; odd entries are the 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  QuadratureResult estimate;
  bool operator<(const Panel& other) const { return estimate.abs_error < other.estimate.abs_error; }
};

} // namespace

QuadratureResult gauss_kronrod15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[static_cast<std::size_t>(j)];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kWgk[static_cast<std::size_t>(j)] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[static_cast<std::size_t>(j / 2)] * (f1 + f2);
  }

  QuadratureResult r;
  r.value = kronrod * half;
  r.abs_error = std::abs((kronrod - gauss) * half);
  r.evaluations = 15;
  r.converged = true;
  return r;
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& options) {
  if (!(std::isfinite(a) && std::isfinite(b)) || b < a) {
    throw DomainError("integrate_adaptive needs a finite interval with a <= b");
  }
  if (options.initial_panels < 1) throw DomainError("initial_panels must be >= 1");
  QuadratureResult total;
  if (a == b) {
    total.converged = true;
    return total;
  }

  std::priority_queue<Panel> panels;
  long evaluations = 0;
  const double width = (b - a) / options.initial_panels;
  for (int i = 0; i < options.initial_panels; ++i) {
    const double lo = a + i * width;
    const double hi = (i + 1 == options.initial_panels) ? b : lo + width;
    Panel p{lo, hi, gauss_kronrod15(f, lo, hi)};
    evaluations += p.estimate.evaluations;
    panels.push(p);
  }

  auto totals = [&panels] {
    // priority_queue has no iteration; copy the container view.
    auto copy = panels;
    CompensatedSum value;
    CompensatedSum error;
    while (!copy.empty()) {
      value += copy.top().estimate.value;
      error += copy.top().estimate.abs_error;
      copy.pop();
    }
    return std::pair{value.value(), error.value()};
  };

  double value = 0.0;
  double error = 0.0;
  double running_value = 0.0;
  double running_error = 0.0;
  {
    auto [v, e] = totals();
    running_value = v;
    running_error = e;
  }

  int subdivisions = 0;
  bool converged = false;
  while (true) {
    const double target = std::max(options.abs_tol, options.rel_tol * std::abs(running_value));
    if (running_error <= target) {
      converged = true;
      break;
    }
    if (subdivisions >= options.max_subdivisions) break;

    Panel worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break; // interval exhausted at machine precision
    panels.pop();
    Panel left{worst.a, mid, gauss_kronrod15(f, worst.a, mid)};
    Panel right{mid, worst.b, gauss_kronrod15(f, mid, worst.b)};
    evaluations += 30;
    running_value += left.estimate.value + right.estimate.value - worst.estimate.value;
    running_error += left.estimate.abs_error + right.estimate.abs_error - worst.estimate.abs_error;
    panels.push(left);
    panels.push(right);
    ++subdivisions;

    // Refresh the running sums now and then so cancellation cannot build up.
    if (subdivisions % 64 == 0) {
      auto [v, e] = totals();
      running_value = v;
      running_error = e;
    }
  }

  std::tie(value, error) = totals();
  total.value = value;
  total.abs_error = error;
  total.evaluations = evaluations;
  total.converged = converged || error <= std::max(options.abs_tol, options.rel_tol * std::abs(value));
  return total;
}

} // namespace nrsense
