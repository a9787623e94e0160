#include "nrsense/mcsim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nrsense/errors.hpp"
#include "nrsense/parallel.hpp"

namespace nrsense {

namespace {

int integer_u(double u) {
  if (!(u >= 1.0) || u != std::floor(u) || u > 1e6) {
    throw DomainError("test-statistic simulation needs an integer u >= 1, got " + std::to_string(u));
  }
  return static_cast<int>(u);
}

std::uint64_t block_count(std::uint64_t trials) {
  if (trials == 0) throw DomainError("trial count must be positive");
  return (trials + kTrialsPerBlock - 1) / kTrialsPerBlock;
}

std::uint64_t block_size(std::uint64_t block, std::uint64_t trials) {
  return std::min<std::uint64_t>(kTrialsPerBlock, trials - block * kTrialsPerBlock);
}

double draw_snr(const SnrSource& source, RandomStream& stream) {
  if (const auto* gamma = std::get_if<double>(&source)) return *gamma;
  return sample_cascade_snr(std::get<ChannelSpec>(source), stream);
}

void validate_source(const SnrSource& source) {
  if (const auto* gamma = std::get_if<double>(&source)) {
    if (!(*gamma >= 0.0) || !std::isfinite(*gamma)) throw DomainError("SNR must be finite and >= 0");
  } else {
    std::get<ChannelSpec>(source).validate();
  }
}

} // namespace

SimReport SimReport::from_counts(std::uint64_t trials, std::uint64_t hits, std::uint64_t seed) {
  const double p = static_cast<double>(hits) / static_cast<double>(trials);
  return {trials, hits, p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials)), seed};
}

double sample_test_statistic(int u, double gamma, Hypothesis hyp, RandomStream& stream) {
  if (u < 1) throw DomainError("u must be >= 1");
  const double shift = hyp == Hypothesis::H1 ? std::sqrt(2.0 * gamma) : 0.0;
  const double first = stream.normal() + shift;
  double y = first * first;
  for (int i = 1; i < 2 * u; ++i) {
    const double z = stream.normal();
    y += z * z;
  }
  return y;
}

std::vector<DetectorSim> simulate_detector_sweep(double u, std::span<const double> lambdas,
                                                 const SnrSource& source, std::uint64_t trials,
                                                 std::uint64_t seed, unsigned workers) {
  const int iu = integer_u(u);
  validate_source(source);
  for (double lambda : lambdas) DetectorParams{u, lambda}.validate();

  const std::uint64_t blocks = block_count(trials);
  const std::size_t T = lambdas.size();
  std::vector<std::uint64_t> null_hits(blocks * T, 0);
  std::vector<std::uint64_t> signal_hits(blocks * T, 0);

  parallel_for(blocks, workers, [&](std::size_t b) {
    RandomStream h0(seed, derive_stream(b, 0, StreamPurpose::null_statistic));
    RandomStream h1(seed, derive_stream(b, 0, StreamPurpose::signal_statistic));
    const std::uint64_t count = block_size(b, trials);
    for (std::uint64_t i = 0; i < count; ++i) {
      const double y0 = sample_test_statistic(iu, 0.0, Hypothesis::H0, h0);
      const double gamma = draw_snr(source, h1);
      const double y1 = sample_test_statistic(iu, gamma, Hypothesis::H1, h1);
      for (std::size_t t = 0; t < T; ++t) {
        null_hits[b * T + t] += y0 > lambdas[t];
        signal_hits[b * T + t] += y1 > lambdas[t];
      }
    }
  });

  std::vector<DetectorSim> out(T);
  for (std::size_t t = 0; t < T; ++t) {
    std::uint64_t h0 = 0;
    std::uint64_t h1 = 0;
    for (std::uint64_t b = 0; b < blocks; ++b) {
      h0 += null_hits[b * T + t];
      h1 += signal_hits[b * T + t];
    }
    out[t] = {SimReport::from_counts(trials, h0, seed), SimReport::from_counts(trials, h1, seed)};
  }
  return out;
}

DetectorSim simulate_detector(const DetectorParams& params, const SnrSource& source, std::uint64_t trials,
                              std::uint64_t seed, unsigned workers) {
  params.validate();
  const double lambda = params.lambda;
  return simulate_detector_sweep(params.u, std::span<const double>(&lambda, 1), source, trials, seed,
                                 workers)
      .front();
}

CssSim simulate_css(const FusionNetwork& network, std::uint64_t trials, std::uint64_t seed, unsigned workers) {
  network.validate();
  const std::size_t M = network.users.size();
  if (M > 0xFFFF) throw DomainError("too many users for the stream layout");
  std::vector<int> u(M);
  for (std::size_t i = 0; i < M; ++i) u[i] = integer_u(network.users[i].detector.u);

  struct Counts {
    std::uint64_t global_alarm = 0;
    std::uint64_t global_miss = 0;
    std::vector<std::uint64_t> local_alarm;
    std::vector<std::uint64_t> local_miss;
  };
  const std::uint64_t blocks = block_count(trials);
  std::vector<Counts> counts(blocks);

  parallel_for(blocks, workers, [&](std::size_t b) {
    const std::uint64_t count = block_size(b, trials);
    Counts& c = counts[b];
    c.local_alarm.assign(M, 0);
    c.local_miss.assign(M, 0);
    // alarm[t], detect[t]: some report of trial t arrived at the centre as 1
    std::vector<char> alarm(count, 0);
    std::vector<char> detect(count, 0);
    for (std::size_t i = 0; i < M; ++i) {
      const auto& user = network.users[i];
      const auto uid = static_cast<std::uint32_t>(i);
      RandomStream h0(seed, derive_stream(b, uid, StreamPurpose::null_statistic));
      RandomStream h1(seed, derive_stream(b, uid, StreamPurpose::signal_statistic));
      RandomStream f0(seed, derive_stream(b, uid, StreamPurpose::null_flips));
      RandomStream f1(seed, derive_stream(b, uid, StreamPurpose::signal_flips));
      const bool flips = user.p_e > 0.0;
      for (std::uint64_t t = 0; t < count; ++t) {
        bool d0 = sample_test_statistic(u[i], 0.0, Hypothesis::H0, h0) > user.detector.lambda;
        const double gamma = sample_cascade_snr(user.channel, h1);
        bool d1 = sample_test_statistic(u[i], gamma, Hypothesis::H1, h1) > user.detector.lambda;
        c.local_alarm[i] += d0;
        c.local_miss[i] += !d1;
        if (flips) {
          if (f0.uniform() <= user.p_e) d0 = !d0;
          if (f1.uniform() <= user.p_e) d1 = !d1;
        }
        alarm[t] |= static_cast<char>(d0);
        detect[t] |= static_cast<char>(d1);
      }
    }
    for (std::uint64_t t = 0; t < count; ++t) {
      c.global_alarm += alarm[t] != 0;
      c.global_miss += detect[t] == 0;
    }
  });

  CssSim out;
  std::uint64_t alarms = 0;
  std::uint64_t misses = 0;
  std::vector<std::uint64_t> local_alarm(M, 0);
  std::vector<std::uint64_t> local_miss(M, 0);
  for (const auto& c : counts) {
    alarms += c.global_alarm;
    misses += c.global_miss;
    for (std::size_t i = 0; i < M; ++i) {
      local_alarm[i] += c.local_alarm[i];
      local_miss[i] += c.local_miss[i];
    }
  }
  out.q_f = SimReport::from_counts(trials, alarms, seed);
  out.q_m = SimReport::from_counts(trials, misses, seed);
  for (std::size_t i = 0; i < M; ++i) {
    out.local_pf.push_back(SimReport::from_counts(trials, local_alarm[i], seed));
    out.local_pm.push_back(SimReport::from_counts(trials, local_miss[i], seed));
  }
  return out;
}

} // namespace nrsense
