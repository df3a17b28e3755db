#pragma once

#include <cmath>
#include <cstdint>

namespace svshrink {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

/// 64-bit finalizer (splitmix64). Bijective, so distinct counters map to
/// distinct outputs within a stream.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

/// Namespaces for stream ids so independent consumers of the same seed never
/// collide. Layout: kind in the top 16 bits, experiment point in the middle,
/// replicate in the low 24 bits.
enum class StreamKind : std::uint64_t {
  kMatrixRisk = 1,
  kSequenceRisk = 2,
  kBoundarySampler = 3,
  kObservation = 4,
  kPriorSampler = 5,
  kGeneric = 6,
};

inline constexpr std::uint64_t stream_id(StreamKind kind, std::uint64_t point,
                                         std::uint64_t replicate) {
  return (static_cast<std::uint64_t>(kind) << 48) ^ (point << 24) ^ replicate;
}

/// Counter-based generator: value k of stream (seed, stream) is
/// mix64(mix64(seed + GOLDEN*(stream+1)) + GOLDEN*k). Stateless apart from the
/// counter, so replicates are reproducible across platforms and thread
/// schedules given (seed, stream).
class CounterRng {
public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : base_(mix64(seed + kGolden * (stream + 1))) {}

  std::uint64_t next_u64() { return mix64(base_ + kGolden * (++counter_)); }

  /// Uniform in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

/// Standard Gaussian stream via Box-Muller on CounterRng; pairs are cached so
/// consecutive calls consume uniforms two at a time in a fixed order.
class GaussianStream {
public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - rng_.next_unit();  // in (0,1], log is finite
    const double u2 = rng_.next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(angle);
    have_spare_ = true;
    return r * std::cos(angle);
  }

private:
  CounterRng rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace svshrink
