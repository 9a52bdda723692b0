#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "seunet/image.hpp"
#include "seunet/semigroup.hpp"

namespace seunet {

/// Sigma at the sharpest level of a lifting: either the raw image (sigma 0)
/// or one base-sigma blur. Coarser levels always use sigma0 * gamma^s.
enum class Sigma0Policy { kSigma0, kIdentity };

/// A function on the scale-translation semigroup, sampled on S discrete
/// scale levels: index s corresponds to semigroup scale gamma^s, i.e.
/// Gaussian scale sigma0 * gamma^s when produced by gaussian_lift. The scale
/// axis is ordered fine to coarse.
template <class T>
struct LiftedSignal {
  int gamma = 2;
  T base_sigma = T(1);
  Sigma0Policy policy = Sigma0Policy::kSigma0;
  std::size_t s = 0, h = 0, w = 0, c = 0;
  std::vector<T> v;

  LiftedSignal() = default;
  LiftedSignal(std::size_t s_, std::size_t h_, std::size_t w_, std::size_t c_, int gamma_ = 2,
               T base_sigma_ = T(1), Sigma0Policy policy_ = Sigma0Policy::kSigma0)
      : gamma(gamma_), base_sigma(base_sigma_), policy(policy_), s(s_), h(h_), w(w_), c(c_),
        v(s_ * h_ * w_ * c_, T(0)) {
    if (s < 1) throw std::invalid_argument("LiftedSignal: need at least one scale level");
    if (gamma < 2) throw std::invalid_argument("LiftedSignal: gamma must be an integer >= 2");
  }

  std::size_t size() const { return v.size(); }
  T& at(std::size_t si, std::size_t y, std::size_t x, std::size_t ch) {
    return v[((si * h + y) * w + x) * c + ch];
  }
  const T& at(std::size_t si, std::size_t y, std::size_t x, std::size_t ch) const {
    return v[((si * h + y) * w + x) * c + ch];
  }
};

/// Sampled Gaussian on [-r, r], r = ceil(4 sigma), normalized to sum 1.
/// sigma = 0 degenerates to the unit impulse. 2-D kernels are formed
/// separably from this.
template <class T>
std::vector<T> gaussian_kernel(T sigma) {
  if (sigma < T(0)) throw std::invalid_argument("gaussian_kernel: sigma must be >= 0");
  if (sigma == T(0)) return {T(1)};
  const long r = static_cast<long>(std::ceil(4.0 * static_cast<double>(sigma)));
  std::vector<T> k(2 * r + 1);
  const double inv2s2 = 1.0 / (2.0 * static_cast<double>(sigma) * static_cast<double>(sigma));
  double sum = 0;
  for (long t = -r; t <= r; ++t) {
    const double w = std::exp(-static_cast<double>(t * t) * inv2s2);
    k[t + r] = static_cast<T>(w);
    sum += w;
  }
  for (T& w : k) w = static_cast<T>(static_cast<double>(w) / sum);
  return k;
}

/// Separable blur with zero-same padding; extent preserved. The kernel sums
/// to one, so constancy is exact away from a border of the kernel radius.
template <class T>
PlaneImage<T> gaussian_blur(const PlaneImage<T>& f, T sigma) {
  const std::vector<T> k = gaussian_kernel(sigma);
  const long r = (static_cast<long>(k.size()) - 1) / 2;
  if (r == 0) return f;
  const long h = f.h, w = f.w, c = f.c;
  PlaneImage<T> tmp(f.h, f.w, f.c), out(f.h, f.w, f.c);
  for (long y = 0; y < h; ++y)
    for (long x = 0; x < w; ++x) {
      const long d0 = std::max(-r, -x), d1 = std::min(r, w - 1 - x);
      for (long ch = 0; ch < c; ++ch) {
        T acc = 0;
        for (long d = d0; d <= d1; ++d) acc += k[d + r] * f.at(y, x + d, ch);
        tmp.at(y, x, ch) = acc;
      }
    }
  for (long y = 0; y < h; ++y) {
    const long d0 = std::max(-r, -y), d1 = std::min(r, h - 1 - y);
    for (long x = 0; x < w; ++x)
      for (long ch = 0; ch < c; ++ch) {
        T acc = 0;
        for (long d = d0; d <= d1; ++d) acc += k[d + r] * f.at(y + d, x, ch);
        out.at(y, x, ch) = acc;
      }
  }
  return out;
}

/// Sigma of scale level s under the given lifting parameters.
template <class T>
T lift_sigma(std::size_t level, int gamma, T sigma0, Sigma0Policy policy) {
  if (level == 0) return policy == Sigma0Policy::kIdentity ? T(0) : sigma0;
  return sigma0 * static_cast<T>(ipow(gamma, static_cast<int>(level)));
}

/// Gaussian lifting: level s holds the image blurred at sigma0 * gamma^s.
template <class T>
LiftedSignal<T> gaussian_lift(const PlaneImage<T>& f, std::size_t scales, int gamma = 2,
                              T sigma0 = T(1), Sigma0Policy policy = Sigma0Policy::kSigma0) {
  if (scales < 1) throw std::invalid_argument("gaussian_lift: need at least one scale");
  LiftedSignal<T> out(scales, f.h, f.w, f.c, gamma, sigma0, policy);
  for (std::size_t s = 0; s < scales; ++s) {
    const T sigma = lift_sigma(s, gamma, sigma0, policy);
    const PlaneImage<T> level = sigma > T(0) ? gaussian_blur(f, sigma) : f;
    std::copy(level.v.begin(), level.v.end(), out.v.begin() + s * f.h * f.w * f.c);
  }
  return out;
}

/// Right action of (gamma^k, z) on a lifted signal:
///   out(l, y) = f(l + k, gamma^k y + z).
/// The output keeps the S - k scale levels and the maximal axis-aligned grid
/// of in-domain sources.
template <class T>
LiftedSignal<T> lifted_action(const SemigroupElement& g, const LiftedSignal<T>& f) {
  check_semigroup_element(g);
  if (static_cast<std::size_t>(g.k) >= f.s)
    throw std::invalid_argument("lifted_action: scale shift k=" + std::to_string(g.k) +
                                " leaves no scale levels of S=" + std::to_string(f.s));
  const long step = ipow(f.gamma, g.k);
  const long h = static_cast<long>(f.h), w = static_cast<long>(f.w);
  if (g.z[0] < 0 || g.z[0] >= h || g.z[1] < 0 || g.z[1] >= w)
    throw std::invalid_argument("lifted_action: empty output, translation " + to_string(g) +
                                " leaves the domain");
  const long oh = (h - 1 - g.z[0]) / step + 1;
  const long ow = (w - 1 - g.z[1]) / step + 1;
  LiftedSignal<T> out(f.s - g.k, oh, ow, f.c, f.gamma,
                      f.base_sigma * static_cast<T>(step), f.policy);
  for (std::size_t l = 0; l < out.s; ++l)
    for (long y = 0; y < oh; ++y)
      for (long x = 0; x < ow; ++x) {
        const long sy = step * y + g.z[0];
        const long sx = step * x + g.z[1];
        for (std::size_t ch = 0; ch < f.c; ++ch)
          out.at(l, y, x, ch) = f.at(l + g.k, sy, sx, ch);
      }
  return out;
}

/// Max-projection along the scale axis: out(z) = max_s f(s, z).
template <class T>
PlaneImage<T> max_project(const LiftedSignal<T>& f) {
  PlaneImage<T> out(f.h, f.w, f.c);
  for (std::size_t y = 0; y < f.h; ++y)
    for (std::size_t x = 0; x < f.w; ++x)
      for (std::size_t ch = 0; ch < f.c; ++ch) {
        T m = f.at(0, y, x, ch);
        for (std::size_t s = 1; s < f.s; ++s) m = std::max(m, f.at(s, y, x, ch));
        out.at(y, x, ch) = m;
      }
  return out;
}

}  // namespace seunet
