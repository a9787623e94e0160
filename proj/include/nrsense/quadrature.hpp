#pragma once

#include <functional>

namespace nrsense {

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  long evaluations = 0;
  bool converged = false;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  /// Equal-width panels the interval is split into before refinement.
  int initial_panels = 1;
  int max_subdivisions = 4000;
};

/// 15-point Gauss-Kronrod rule on [a, b]; abs_error is |K15 - G7|.
QuadratureResult gauss_kronrod15(const std::function<double(double)>& f, double a, double b);

/// Globally adaptive Gauss-Kronrod integration on a finite interval: the
/// panel with the largest error estimate is bisected until the summed
/// estimate meets max(abs_tol, rel_tol * |value|) or the subdivision budget
/// runs out (converged = false).
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& options = {});

} // namespace nrsense
