#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace seunet {

/// Counter-based splittable generator. A stream is a (key, counter) pair;
/// every draw hashes key^counter through the splitmix64 finalizer, so draws
/// are pure functions of (seed, labels, draw index). Splitting derives an
/// independent key and never advances the parent, which keeps experiment
/// substreams stable when code between draws changes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(mix(seed + kGolden) ^ stream)), ctr_(0) {}

  /// Independent child stream labeled by a string (e.g. "init", "shuffle").
  Rng split(std::string_view label) const {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (char c : label) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    return Rng(FromKey{}, mix(key_ ^ h));
  }
  /// Independent child stream labeled by an index.
  Rng split(std::uint64_t salt) const { return Rng(FromKey{}, mix(key_ ^ mix(salt + kGolden))); }

  std::uint64_t next_u64() { return mix(key_ + kGolden * ++ctr_); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] inclusive.
  long uniform_int(long lo, long hi) {
    return lo + static_cast<long>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  bool bernoulli(double p) { return uniform() < p; }

  double normal() {
    // Box-Muller, two fresh uniforms per draw; no cached spare so the
    // draw count per call is fixed.
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  struct FromKey {};
  Rng(FromKey, std::uint64_t key) : key_(key), ctr_(0) {}

  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t ctr_;
};

}  // namespace seunet
