#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "nrsense/detector.hpp"
#include "nrsense/errors.hpp"
#include "nrsense/fusion.hpp"
#include "nrsense/mcsim.hpp"
#include "nrsense/quadrature.hpp"

using namespace nrsense;
using Catch::Approx;

namespace {

const double kQ5at5 = 0.44049328506521241; // Q(5, 5)

double integrate_truncation(const ChannelSpec& spec, ApproxOrder order, double u, double lambda) {
  const FitParams fit = fit_params(spec);
  auto integrand = [&](double s) {
    if (s <= 0.0) return 0.0;
    const double w = std::exp((fit.m - 1.0) * std::log(s) - s - std::lgamma(fit.m));
    return w * pd_awgn_approx(order, u, lambda, std::pow(s / fit.beta, spec.n));
  };
  QuadratureOptions opts;
  opts.abs_tol = 1e-11;
  opts.initial_panels = 20;
  opts.max_subdivisions = 10000;
  return integrate_adaptive(integrand, 0.0, inv_reg_upper_gamma(fit.m, 1e-16), opts).value;
}

} // namespace

TEST_CASE("detector parameter invariants") {
  CHECK_NOTHROW(DetectorParams{1.0, 0.0}.validate());
  CHECK_THROWS_AS((DetectorParams{0.9, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((DetectorParams{5.0, -1.0}.validate()), DomainError);
}

TEST_CASE("false alarm probability") {
  CHECK(false_alarm({5.0, 0.0}) == 1.0);
  CHECK(false_alarm({5.0, 10.0}) == Approx(kQ5at5).epsilon(1e-13));
  CHECK(false_alarm({5.0, 20.0}) == Approx(0.029252688076961073).epsilon(1e-13));
}

TEST_CASE("threshold inversion") {
  CHECK(threshold_for_pf(5.0, 1.0) == 0.0);
  CHECK(threshold_for_pf(1.0, 0.1) == Approx(2.0 * std::log(10.0)).epsilon(1e-14));
  CHECK(std::abs(threshold_for_pf(5.0, kQ5at5) - 10.0) <= 1e-6);
  CHECK(threshold_for_pf(5.0, 0.1) == Approx(15.987179172105261).epsilon(1e-13));
  for (double u : {1.0, 2.5, 5.0, 10.0, 40.0}) {
    for (double pf : log_grid(1e-8, 1.0, 40)) {
      CHECK(std::abs(false_alarm({u, threshold_for_pf(u, pf)}) - pf) <= 1e-10);
    }
  }
  CHECK_THROWS_AS(threshold_for_pf(5.0, 0.0), DomainError);
  CHECK_THROWS_AS(threshold_for_pf(5.0, 1.01), DomainError);
  CHECK_THROWS_AS(threshold_for_pf(0.5, 0.1), DomainError);
}

TEST_CASE("AWGN detection probability") {
  for (double u : {1.0, 5.0, 10.0}) {
    for (double lambda : {0.0, 3.0, 12.0, 40.0}) {
      CHECK(std::abs(pd_awgn({u, lambda}, 0.0) - false_alarm({u, lambda})) <= 1e-12);
    }
    CHECK(pd_awgn({u, 0.0}, 7.0) == 1.0);
  }
  CHECK(pd_awgn({5.0, 10.0}, 5.0) == Approx(0.92427309615118104).epsilon(1e-12));
  CHECK_THROWS_AS(pd_awgn({5.0, 10.0}, -1.0), DomainError);
}

TEST_CASE("AWGN detection probability against the test-statistic sampler") {
  const DetectorSim sim = simulate_detector({5.0, 10.0}, 5.0, 1'000'000, 21, 0);
  CHECK(std::abs(sim.pd.estimate - pd_awgn({5.0, 10.0}, 5.0)) <= 3.0 * sim.pd.std_error);
}

TEST_CASE("fading moment integral, n = 1 closed form") {
  for (double a : {1.2, 3.7, 50.5, 500.3}) {
    for (double beta : {0.05, 0.7, 4.0}) {
      const double closed = std::lgamma(a) - a * std::log1p(beta);
      CHECK(log_fading_moment_integral(a, beta, 1) == Approx(closed).epsilon(1e-12));
    }
  }
}

TEST_CASE("fading moment integral reference values") {
  // mpmath quadrature at 40 digits
  CHECK(log_fading_moment_integral(0.76, 1.2, 3) == Approx(-0.67439458659722110927).epsilon(1e-12));
  CHECK(log_fading_moment_integral(10.75, 1.68, 5) == Approx(11.852136244656461792).epsilon(1e-12));
  CHECK(log_fading_moment_integral(300.7, 1.35, 4) == Approx(1407.5777118380208395).epsilon(1e-13));
  CHECK(log_fading_moment_integral(1.5, 0.3, 2) == Approx(-0.44932579497939635965).epsilon(1e-12));
  CHECK(log_fading_moment_integral(0.9, 5.0, 2) == Approx(-2.4395809036863457338).epsilon(1e-12));
  CHECK_THROWS_AS(log_fading_moment_integral(0.3, 1.0, 3), DomainError);
}

TEST_CASE("series moments are the fitted-law averages of g^l e^-g") {
  const ChannelSpec spec = ChannelSpec::from_db(3, 10.0);
  const DetectionAverager series(spec, SeriesMethod{ApproxOrder{40}});
  REQUIRE(series.log_moments().size() == 41);
  const FitParams fit = fit_params(spec);
  for (int l : {0, 1, 7, 40}) {
    auto integrand = [&](double s) {
      if (s <= 0.0) return 0.0;
      const double g = std::pow(s / fit.beta, 3);
      return std::exp((fit.m - 1.0) * std::log(s) - s - std::lgamma(fit.m) + l * std::log(g) - g);
    };
    QuadratureOptions opts;
    opts.abs_tol = 0.0;
    opts.rel_tol = 1e-12;
    opts.initial_panels = 20;
    const double direct = integrate_adaptive(integrand, 0.0, 60.0, opts).value;
    CHECK(std::exp(series.log_moments()[static_cast<std::size_t>(l)]) == Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("series average equals the integral of the truncated approximation") {
  for (int n = 3; n <= 5; ++n) {
    const ChannelSpec spec = ChannelSpec::from_db(n, 10.0);
    const ApproxOrder order{500};
    const DetectionAverager series(spec, SeriesMethod{order});
    for (double pf : {1e-3, 0.1, 0.6}) {
      const double lambda = threshold_for_pf(5.0, pf);
      CHECK(std::abs(series.pd({5.0, lambda}).value - integrate_truncation(spec, order, 5.0, lambda)) <= 1e-6);
    }
  }
}

TEST_CASE("zero threshold detects with certainty") {
  const ChannelSpec spec = ChannelSpec::from_db(3, 10.0);
  CHECK(avg_pd({5.0, 0.0}, spec, QuadratureMethod{}).value == 1.0);
  CHECK(avg_pd({5.0, 0.0}, spec, MonteCarloMethod{10'000, 1, 1}).value == 1.0);
  CHECK(avg_pm({5.0, 0.0}, spec, QuadratureMethod{}).value == 0.0);
}

TEST_CASE("huge thresholds miss with certainty") {
  const ChannelSpec spec = ChannelSpec::from_db(3, 10.0);
  CHECK(avg_pm({5.0, 1e7}, spec, QuadratureMethod{}).value == Approx(1.0).margin(1e-9));
}

TEST_CASE("detection and miss probabilities are complementary") {
  for (const AvgPdMethod& method : {AvgPdMethod{SeriesMethod{ApproxOrder{100}}}, AvgPdMethod{QuadratureMethod{}}}) {
    const ChannelSpec spec = ChannelSpec::from_db(4, 10.0, 2);
    const DetectionAverager avg(spec, method);
    for (double lambda : {1.0, 10.0, 25.0}) {
      CHECK(std::abs(avg.pd({5.0, lambda}).value + avg.pm({5.0, lambda}).value - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("quadrature average is monotone in threshold and SNR") {
  for (int n : {1, 3, 5}) {
    double previous_snr_pd = 0.0;
    for (double snr_db : {-10.0, 0.0, 10.0, 20.0}) {
      const DetectionAverager avg(ChannelSpec::from_db(n, snr_db), QuadratureMethod{});
      double previous = 1.0;
      for (double lambda = 0.0; lambda <= 60.0; lambda += 4.0) {
        const double pd = avg.pd({5.0, lambda}).value;
        CHECK(pd <= previous + 1e-12);
        previous = pd;
      }
      const double pd = avg.pd({5.0, 16.0}).value;
      CHECK(pd >= previous_snr_pd - 1e-12);
      previous_snr_pd = pd;
    }
  }
}

TEST_CASE("vanishing SNR collapses to the false-alarm probability") {
  for (int n = 1; n <= 5; ++n) {
    const ChannelSpec spec{n, 1e-6, 1};
    for (double pf : {0.01, 0.1, 0.5}) {
      const DetectorParams p{5.0, threshold_for_pf(5.0, pf)};
      CHECK(std::abs(avg_pd(p, spec, QuadratureMethod{}).value - pf) <= 1e-3);
    }
  }
}

TEST_CASE("stronger channel detects better") {
  const DetectorParams p{5.0, threshold_for_pf(5.0, 0.1)};
  CHECK(avg_pd(p, ChannelSpec{1, 100.0, 1}, QuadratureMethod{}).value >
        avg_pd(p, ChannelSpec{1, 0.1, 1}, QuadratureMethod{}).value);
}

TEST_CASE("miss probability grows with cascade order") {
  const DetectorParams p{5.0, threshold_for_pf(5.0, 0.1)};
  const double pm3 = avg_pm(p, ChannelSpec::from_db(3, 10.0), QuadratureMethod{}).value;
  const double pm4 = avg_pm(p, ChannelSpec::from_db(4, 10.0), QuadratureMethod{}).value;
  const double pm5 = avg_pm(p, ChannelSpec::from_db(5, 10.0), QuadratureMethod{}).value;
  CHECK(pm3 < pm4);
  CHECK(pm4 < pm5);
}

TEST_CASE("quadrature reference values") {
  // scipy: Gamma(m) weight against the noncentral chi-square survival function.
  const DetectorParams p{5.0, threshold_for_pf(5.0, 0.1)};
  CHECK(avg_pd(p, ChannelSpec::from_db(3, 10.0), QuadratureMethod{}).value == Approx(0.7782311747966991).margin(1e-7));
  CHECK(avg_pd(p, ChannelSpec::from_db(4, 10.0), QuadratureMethod{}).value == Approx(0.7682894250357046).margin(1e-7));
  CHECK(avg_pd(p, ChannelSpec::from_db(5, 10.0), QuadratureMethod{}).value == Approx(0.7621557952431406).margin(1e-7));
}

TEST_CASE("quadrature agrees with Monte Carlo on the exact cascade") {
  const DetectorParams p{5.0, threshold_for_pf(5.0, 0.1)};
  for (int n = 3; n <= 5; ++n) {
    const ChannelSpec spec = ChannelSpec::from_db(n, 10.0);
    const Estimate mc = avg_pd(p, spec, MonteCarloMethod{1'000'000, 5, 0});
    const double quad = avg_pd(p, spec, QuadratureMethod{}).value;
    CHECK(mc.std_error > 0.0);
    CHECK(std::abs(mc.value - quad) <= std::max(0.02, 4.0 * mc.std_error));
  }
}

TEST_CASE("Monte Carlo averaging is deterministic across worker counts") {
  const ChannelSpec spec = ChannelSpec::from_db(3, 10.0, 2);
  const DetectorParams p{5.0, 14.0};
  const Estimate one = avg_pd(p, spec, MonteCarloMethod{200'000, 9, 1});
  const Estimate many = avg_pd(p, spec, MonteCarloMethod{200'000, 9, 8});
  CHECK(one.value == many.value);
  CHECK(one.std_error == many.std_error);
  CHECK_THROWS_AS(avg_pd(p, spec, MonteCarloMethod{999, 1, 1}), DomainError);
}

TEST_CASE("method labels") {
  CHECK(method_label(SeriesMethod{}) == "series");
  CHECK(method_label(QuadratureMethod{}) == "quadrature");
  CHECK(method_label(MonteCarloMethod{}) == "monte_carlo");
}
