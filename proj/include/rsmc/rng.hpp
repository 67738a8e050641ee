#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace rsmc {

// Identifies one reproducible random stream. The mapping
// (master_seed, stream) -> generator state is the fixed function implemented
// by make_rng below; changing it is a breaking change for every serialized
// result, so don't.
struct SeedSpec {
  std::uint64_t master_seed = 0x5eed5eed5eed5eedULL;
  std::uint64_t stream = 0;

  SeedSpec with_stream(std::uint64_t s) const { return {master_seed, s}; }
};

namespace detail {
// Finalizer from splitmix64 (Vigna); full-avalanche 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// splitmix64 engine. Counter-based: the state is a plain counter and the
// output is a mix of it, so constructing a fresh engine per stream is O(1)
// and streams derived from distinct (seed, stream, salt) tuples are
// decorrelated by the mixer's avalanche.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on (0, 1]; never returns 0 so log() stays finite.
  double uniform01() {
    return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform on [0, 1).
  double uniform01_left() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  double exponential(double rate) { return -std::log(uniform01()) / rate; }

  // Box-Muller, cosine branch only. No cached spare: every call consumes
  // exactly two uniforms, which keeps draw counts predictable.
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01_left();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::uint64_t state_;
};

// The documented seed derivation: state = mix(mix(master ^ mix(stream)) ^ salt).
// Salts separate statistics that share a master seed and stream numbering.
inline SplitMix64 make_rng(const SeedSpec& seed, std::uint64_t salt = 0) {
  std::uint64_t s = detail::mix64(seed.master_seed ^ detail::mix64(seed.stream));
  return SplitMix64(detail::mix64(s ^ salt));
}

// FNV-1a, used to turn statistic tags into salts (and for file checksums).
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t salt_of(const char* tag) {
  std::size_t n = 0;
  while (tag[n] != '\0') ++n;
  return fnv1a64(tag, n);
}

}  // namespace rsmc
