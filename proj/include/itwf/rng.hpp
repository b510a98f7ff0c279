#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace itwf {

/// Philox4x64-10 block function. Maps a 256-bit counter under a 128-bit key to
/// 256 pseudo-random bits.
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key);

/// Deterministic random stream identified by (seed, stream_id).
///
/// The pair forms the Philox key, so every stream is an independent sequence
/// and draws never depend on which thread consumes them or in what order other
/// streams are used. A stream is a value: copying it forks an identical
/// sequence. Not safe to share between concurrent consumers.
///
/// Satisfies UniformRandomBitGenerator so it can feed std algorithms, but the
/// library's own distributions below are used everywhere for portability.
class RngStream {
public:
  using result_type = std::uint64_t;

  RngStream() = default;
  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1]; safe as a log argument.
  double uniform_pos();
  /// Standard normal via Box-Muller. Draws come in pairs; the spare is cached
  /// as part of the stream state.
  double normal();
  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);
  /// Poisson draw with the given rate (>= 0). Exact inversion below 30,
  /// rounded normal approximation clamped at 0 above.
  double poisson(double rate);

private:
  void refill();

  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::array<std::uint64_t, 4> counter_{};
  std::array<std::uint64_t, 4> block_{};
  int used_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

} // namespace itwf
