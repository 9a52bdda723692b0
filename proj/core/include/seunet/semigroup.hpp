#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace seunet {

/// Element (gamma^k, z) of the scale-and-translation semigroup. k >= 0:
/// scalings are downscalings only, there is no inverse. z is a (row, col)
/// pixel translation.
struct SemigroupElement {
  int k = 0;
  std::array<long, 2> z{0, 0};
};

inline long ipow(long base, int exp) {
  long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

inline void check_semigroup_element(const SemigroupElement& g) {
  if (g.k < 0) throw std::invalid_argument("SemigroupElement: scale exponent must be >= 0");
}

/// Internal operator: (gamma^a.k, a.z) . (gamma^b.k, b.z)
///   = (gamma^(a.k+b.k), gamma^a.k * b.z + a.z).
inline SemigroupElement semigroup_compose(const SemigroupElement& a, const SemigroupElement& b,
                                          int gamma) {
  check_semigroup_element(a);
  check_semigroup_element(b);
  const long s = ipow(gamma, a.k);
  return SemigroupElement{a.k + b.k, {s * b.z[0] + a.z[0], s * b.z[1] + a.z[1]}};
}

inline SemigroupElement semigroup_identity() { return SemigroupElement{}; }

inline bool operator==(const SemigroupElement& a, const SemigroupElement& b) {
  return a.k == b.k && a.z == b.z;
}

inline std::string to_string(const SemigroupElement& g) {
  return "(k=" + std::to_string(g.k) + ", z=(" + std::to_string(g.z[0]) + "," +
         std::to_string(g.z[1]) + "))";
}

}  // namespace seunet
