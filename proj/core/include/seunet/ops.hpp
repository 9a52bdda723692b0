#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "seunet/tensor.hpp"

namespace seunet {

enum class Padding { kZeroSame, kValid };

namespace detail {
template <class T>
void check_same_or_scalar(const Tensor<T>& a, const Tensor<T>& b, const char* what) {
  if (a.shape() != b.shape() && b.size() != 1 && a.size() != 1)
    throw std::invalid_argument(std::string(what) + ": shapes " + shape_str(a.shape()) + " and " +
                                shape_str(b.shape()) + " are neither equal nor scalar");
}
}  // namespace detail

template <class T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  detail::check_same_or_scalar(a, b, "add");
  const bool bs = b.size() == 1, as = a.size() == 1;
  Grid<T> out = as ? b.value() : a.value();
  if (as) {
    const T av = a.value().data[0];
    for (T& v : out.data) v += av;
  } else if (bs) {
    const T bv = b.value().data[0];
    for (T& v : out.data) v += bv;
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += b.value().data[i];
  }
  return make_op<T>(std::move(out), {a, b}, [as, bs](TapeNode<T>& n) {
    auto& g = n.grad.data;
    for (int pi = 0; pi < 2; ++pi) {
      auto& p = *n.parents[pi];
      if (!p.requires_grad && !p.backprop) continue;
      auto& pg = p.ensure_grad().data;
      const bool scalar_side = (pi == 0) ? as : bs;
      if (scalar_side) {
        T s = 0;
        for (T v : g) s += v;
        pg[0] += s;
      } else {
        for (std::size_t i = 0; i < g.size(); ++i) pg[i] += g[i];
      }
    }
  });
}

template <class T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  detail::check_same_or_scalar(a, b, "mul");
  const bool as = a.size() == 1 && b.size() != 1;
  const Tensor<T>& big = as ? b : a;
  const Tensor<T>& small = as ? a : b;
  const bool scalar = small.size() == 1 && big.size() != 1;
  Grid<T> out = big.value();
  if (scalar) {
    const T s = small.value().data[0];
    for (T& v : out.data) v *= s;
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] *= small.value().data[i];
  }
  // parents ordered (big, small)
  return make_op<T>(std::move(out), {big, small}, [scalar](TapeNode<T>& n) {
    auto& g = n.grad.data;
    auto& pb = *n.parents[0];
    auto& ps = *n.parents[1];
    const auto& bv = pb.value.data;
    const auto& sv = ps.value.data;
    if (pb.requires_grad || pb.backprop) {
      auto& pg = pb.ensure_grad().data;
      if (scalar) {
        const T s = sv[0];
        for (std::size_t i = 0; i < g.size(); ++i) pg[i] += g[i] * s;
      } else {
        for (std::size_t i = 0; i < g.size(); ++i) pg[i] += g[i] * sv[i];
      }
    }
    if (ps.requires_grad || ps.backprop) {
      auto& pg = ps.ensure_grad().data;
      if (scalar) {
        T s = 0;
        for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * bv[i];
        pg[0] += s;
      } else {
        for (std::size_t i = 0; i < g.size(); ++i) pg[i] += g[i] * bv[i];
      }
    }
  });
}

/// Multiply by a compile-time-known constant (no grad w.r.t. the factor).
template <class T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
  Grid<T> out = a.value();
  for (T& v : out.data) v *= factor;
  return make_op<T>(std::move(out), {a}, [factor](TapeNode<T>& n) {
    auto& pg = n.parents[0]->ensure_grad().data;
    for (std::size_t i = 0; i < n.grad.size(); ++i) pg[i] += n.grad.data[i] * factor;
  });
}

template <class T>
Tensor<T> relu(const Tensor<T>& a) {
  Grid<T> out = a.value();
  for (T& v : out.data) v = v > T(0) ? v : T(0);
  return make_op<T>(std::move(out), {a}, [](TapeNode<T>& n) {
    const auto& x = n.parents[0]->value.data;
    auto& pg = n.parents[0]->ensure_grad().data;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] > T(0)) pg[i] += n.grad.data[i];
  });
}

/// Softmax over the last (channel) axis, applied independently per leading
/// index. Max-shifted for stability.
template <class T>
Tensor<T> softmax_channels(const Tensor<T>& a) {
  const std::size_t c = a.shape().back();
  if (c == 0) throw std::invalid_argument("softmax_channels: empty channel axis");
  Grid<T> out = a.value();
  const std::size_t rows = out.size() / c;
  for (std::size_t r = 0; r < rows; ++r) {
    T* p = out.ptr() + r * c;
    T m = p[0];
    for (std::size_t i = 1; i < c; ++i) m = std::max(m, p[i]);
    T z = 0;
    for (std::size_t i = 0; i < c; ++i) {
      p[i] = std::exp(p[i] - m);
      z += p[i];
    }
    for (std::size_t i = 0; i < c; ++i) p[i] /= z;
  }
  return make_op<T>(std::move(out), {a}, [c](TapeNode<T>& n) {
    const auto& y = n.value.data;
    const auto& g = n.grad.data;
    auto& pg = n.parents[0]->ensure_grad().data;
    const std::size_t rows = y.size() / c;
    for (std::size_t r = 0; r < rows; ++r) {
      const T* yp = y.data() + r * c;
      const T* gp = g.data() + r * c;
      T dot = 0;
      for (std::size_t i = 0; i < c; ++i) dot += gp[i] * yp[i];
      T* o = pg.data() + r * c;
      for (std::size_t i = 0; i < c; ++i) o[i] += yp[i] * (gp[i] - dot);
    }
  });
}

template <class T>
Tensor<T> sum(const Tensor<T>& a) {
  T s = 0;
  for (T v : a.value().data) s += v;
  return make_op<T>(Grid<T>(Shape{1}, s), {a}, [](TapeNode<T>& n) {
    const T g = n.grad.data[0];
    auto& pg = n.parents[0]->ensure_grad().data;
    for (T& v : pg) v += g;
  });
}

template <class T>
Tensor<T> mean(const Tensor<T>& a) {
  const T inv = T(1) / static_cast<T>(a.size());
  T s = 0;
  for (T v : a.value().data) s += v;
  return make_op<T>(Grid<T>(Shape{1}, s * inv), {a}, [inv](TapeNode<T>& n) {
    const T g = n.grad.data[0] * inv;
    auto& pg = n.parents[0]->ensure_grad().data;
    for (T& v : pg) v += g;
  });
}

/// Plane cross-correlation of an H x W x Cin grid with a kh x kw x Cin x Cout
/// bank. Zero-same keeps extent ceil(H/stride) with centered taps; valid
/// anchors the window at the origin and shrinks the output.
template <class T>
Tensor<T> plane_correlate(const Tensor<T>& input, const Tensor<T>& kernel, int stride,
                          Padding padding) {
  const auto& is = input.shape();
  const auto& ks = kernel.shape();
  if (is.size() != 3 || ks.size() != 4)
    throw std::invalid_argument("plane_correlate: input must be HxWxC, kernel khxkwxCinxCout");
  const long h = is[0], w = is[1], ci = is[2];
  const long kh = ks[0], kw = ks[1];
  if (ks[2] != static_cast<std::size_t>(ci))
    throw std::invalid_argument("plane_correlate: kernel expects " + std::to_string(ks[2]) +
                                " input channels, input has " + std::to_string(ci));
  const long co = ks[3];
  if (kh % 2 == 0 || kw % 2 == 0) throw std::invalid_argument("plane_correlate: kernel extents must be odd");
  if (stride < 1) throw std::invalid_argument("plane_correlate: stride must be >= 1");

  const bool same = padding == Padding::kZeroSame;
  const long rh = same ? (kh - 1) / 2 : 0;
  const long rw = same ? (kw - 1) / 2 : 0;
  const long oh = same ? (h + stride - 1) / stride : (h - kh) / stride + 1;
  const long ow = same ? (w + stride - 1) / stride : (w - kw) / stride + 1;
  if (oh < 1 || ow < 1) throw std::invalid_argument("plane_correlate: output would be empty");

  Grid<T> out(Shape{static_cast<std::size_t>(oh), static_cast<std::size_t>(ow),
                    static_cast<std::size_t>(co)});
  const T* in = input.value().ptr();
  const T* kp = kernel.value().ptr();
  for (long y = 0; y < oh; ++y)
    for (long x = 0; x < ow; ++x) {
      T* op = out.ptr() + (y * ow + x) * co;
      for (long dy = 0; dy < kh; ++dy) {
        const long iy = stride * y + dy - rh;
        if (iy < 0 || iy >= h) continue;
        for (long dx = 0; dx < kw; ++dx) {
          const long ix = stride * x + dx - rw;
          if (ix < 0 || ix >= w) continue;
          const T* ip = in + (iy * w + ix) * ci;
          const T* krow = kp + (dy * kw + dx) * ci * co;
          for (long c = 0; c < ci; ++c) {
            const T v = ip[c];
            const T* kr = krow + c * co;
            for (long o = 0; o < co; ++o) op[o] += v * kr[o];
          }
        }
      }
    }

  return make_op<T>(std::move(out), {input, kernel},
                    [h, w, ci, kh, kw, co, oh, ow, rh, rw, stride](TapeNode<T>& n) {
                      const auto& g = n.grad.data;
                      auto& pin = *n.parents[0];
                      auto& pker = *n.parents[1];
                      const T* in = pin.value.ptr();
                      const T* kp = pker.value.ptr();
                      T* gi = (pin.requires_grad || pin.backprop) ? pin.ensure_grad().ptr() : nullptr;
                      T* gk = (pker.requires_grad || pker.backprop) ? pker.ensure_grad().ptr() : nullptr;
                      for (long y = 0; y < oh; ++y)
                        for (long x = 0; x < ow; ++x) {
                          const T* gp = g.data() + (y * ow + x) * co;
                          for (long dy = 0; dy < kh; ++dy) {
                            const long iy = stride * y + dy - rh;
                            if (iy < 0 || iy >= h) continue;
                            for (long dx = 0; dx < kw; ++dx) {
                              const long ix = stride * x + dx - rw;
                              if (ix < 0 || ix >= w) continue;
                              const std::size_t ioff = (iy * w + ix) * ci;
                              const std::size_t koff = (dy * kw + dx) * ci * co;
                              for (long c = 0; c < ci; ++c) {
                                if (gi) {
                                  T s = 0;
                                  const T* kr = kp + koff + c * co;
                                  for (long o = 0; o < co; ++o) s += gp[o] * kr[o];
                                  gi[ioff + c] += s;
                                }
                                if (gk) {
                                  const T v = in[ioff + c];
                                  T* kr = gk + koff + c * co;
                                  for (long o = 0; o < co; ++o) kr[o] += v * gp[o];
                                }
                              }
                            }
                          }
                        }
                    });
}

}  // namespace seunet
