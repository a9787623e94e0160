#pragma once

#include <cstdint>
#include <random>

namespace nrsense {

/// Deterministic random stream identified by a 64-bit seed and a stream
/// index. Streams with different indices are seeded independently; a stream
/// is a plain value and must not be shared between threads.
class RandomStream {
public:
  RandomStream(std::uint64_t seed, std::uint64_t stream);

  /// Uniform on (0, 1].
  double uniform() noexcept;
  /// Standard normal, Marsaglia polar method.
  double normal() noexcept;
  /// Exponential with the given mean.
  double exponential(double mean) noexcept;

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Trials drawn from one stream before moving to the next block.
inline constexpr std::uint64_t kTrialsPerBlock = 1u << 16;

enum class StreamPurpose : std::uint32_t {
  null_statistic = 0,
  signal_statistic = 1,
  null_flips = 2,
  signal_flips = 3,
  fading_average = 4,
};

/// Stream index for one block of trials of one user and purpose. Blocks hold
/// a fixed number of trials, so draws never depend on how blocks are spread
/// across threads.
constexpr std::uint64_t derive_stream(std::uint64_t block, std::uint32_t user, StreamPurpose purpose) {
  return (block << 24) | (static_cast<std::uint64_t>(user & 0xFFFFu) << 8) |
         static_cast<std::uint64_t>(purpose);
}

} // namespace nrsense
