#pragma once

// Raw dense kernels for the scale-cross-correlation layer on {B,S,H,W,C}
// buffers (channels last). At output scale level k the spatial taps are
// dilated by gamma^k and read input levels k..k+Ks-1; terms past the top
// level are dropped (scale truncation). Out-of-domain spatial taps
// contribute zero (zero-same).
//
// The float path blocks four output pixels over 8-wide vectors when the
// vectorized channel count is a multiple of 8; everything else goes through
// the generic scalar path. All loops are deterministic; reductions that
// cross the parallel grain accumulate into a fixed chunk grid so results do
// not depend on the worker count.

#include <cstring>
#include <type_traits>
#include <vector>

#include "seunet/parallel.hpp"
#include "seunet/semigroup.hpp"

namespace seunet::kern {

typedef float v8sf __attribute__((vector_size(32), aligned(4)));

struct SccDims {
  long B, S, H, W, Ci, Co, Ks, rh, rw;
  int gamma;
};

namespace detail {

inline long min_l(long a, long b) { return a < b ? a : b; }

template <class T>
inline void scc_fwd_pixel(const T* in, T* out, const T* w, const T* bias, const SccDims& d,
                          long b, long k, long y, long x, long dil, long ls) {
  const long kh = 2 * d.rh + 1, kw = 2 * d.rw + 1;
  T acc[512];
  for (long o = 0; o < d.Co; ++o) acc[o] = bias ? bias[o] : T(0);
  for (long l = 0; l < ls; ++l) {
    const T* lvl = in + ((b * d.S + k + l) * d.H) * d.W * d.Ci;
    const T* wl = w + l * kh * kw * d.Ci * d.Co;
    for (long dy = -d.rh; dy <= d.rh; ++dy) {
      const long yy = y + dil * dy;
      if (yy < 0 || yy >= d.H) continue;
      for (long dx = -d.rw; dx <= d.rw; ++dx) {
        const long xx = x + dil * dx;
        if (xx < 0 || xx >= d.W) continue;
        const T* ip = lvl + (yy * d.W + xx) * d.Ci;
        const T* wp = wl + (((dy + d.rh) * kw) + (dx + d.rw)) * d.Ci * d.Co;
        for (long c = 0; c < d.Ci; ++c) {
          const T v = ip[c];
          const T* wr = wp + c * d.Co;
#pragma GCC ivdep
          for (long o = 0; o < d.Co; ++o) acc[o] += v * wr[o];
        }
      }
    }
  }
  std::memcpy(out + (((b * d.S + k) * d.H + y) * d.W + x) * d.Co, acc, sizeof(T) * d.Co);
}

// Four interior pixels at once, Co a multiple of 8. Weights stream from L1;
// accumulators live in registers.
inline void scc_fwd_block4_f32(const float* in, float* out, const float* w, const float* bias,
                               const SccDims& d, long b, long k, long y, long x, long dil,
                               long ls) {
  const long kh = 2 * d.rh + 1, kw = 2 * d.rw + 1;
  const long nv = d.Co / 8;
  v8sf acc[4][16];
  for (long j = 0; j < nv; ++j) {
    const v8sf bv = bias ? *(const v8sf*)(bias + 8 * j) : v8sf{};
    acc[0][j] = bv; acc[1][j] = bv; acc[2][j] = bv; acc[3][j] = bv;
  }
  for (long l = 0; l < ls; ++l) {
    const float* lvl = in + ((b * d.S + k + l) * d.H) * d.W * d.Ci;
    const float* wl = w + l * kh * kw * d.Ci * d.Co;
    for (long dy = -d.rh; dy <= d.rh; ++dy) {
      const float* iprow = lvl + (y + dil * dy) * d.W * d.Ci;
      for (long dx = -d.rw; dx <= d.rw; ++dx) {
        const float* ip = iprow + (x + dil * dx) * d.Ci;
        const float* wp = wl + (((dy + d.rh) * kw) + (dx + d.rw)) * d.Ci * d.Co;
        for (long c = 0; c < d.Ci; ++c) {
          const float* wr = wp + c * d.Co;
          const float v0 = ip[c];
          const float v1 = ip[d.Ci + c];
          const float v2 = ip[2 * d.Ci + c];
          const float v3 = ip[3 * d.Ci + c];
          for (long j = 0; j < nv; ++j) {
            const v8sf wv = *(const v8sf*)(wr + 8 * j);
            acc[0][j] += v0 * wv;
            acc[1][j] += v1 * wv;
            acc[2][j] += v2 * wv;
            acc[3][j] += v3 * wv;
          }
        }
      }
    }
  }
  float* op = out + (((b * d.S + k) * d.H + y) * d.W + x) * d.Co;
  for (long m = 0; m < 4; ++m)
    for (long j = 0; j < nv; ++j) *(v8sf*)(op + m * d.Co + 8 * j) = acc[m][j];
}

}  // namespace detail

/// out[b,k,y,x,o] = bias[o] + sum_{l,dy,dx,c} in[b,k+l,y+g^k dy,x+g^k dx,c] w[l,dy,dx,c,o]
template <class T>
void scc_forward(const T* in, T* out, const T* w, const T* bias, const SccDims& d) {
  const bool fast = std::is_same_v<T, float> && d.Co % 8 == 0 && d.Co <= 128;
  parallel_for(static_cast<std::size_t>(d.B * d.S * d.H), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t row = lo; row < hi; ++row) {
      const long b = static_cast<long>(row) / (d.S * d.H);
      const long k = (static_cast<long>(row) / d.H) % d.S;
      const long y = static_cast<long>(row) % d.H;
      const long dil = ipow(d.gamma, static_cast<int>(k));
      const long ls = detail::min_l(d.Ks, d.S - k);
      const bool yint = (y >= dil * d.rh && y + dil * d.rh < d.H);
      long x = 0;
      if (fast && yint) {
        for (; x < detail::min_l(dil * d.rw, d.W); ++x)
          detail::scc_fwd_pixel(in, out, w, bias, d, b, k, y, x, dil, ls);
        if constexpr (std::is_same_v<T, float>) {
          for (; x + 3 < d.W - dil * d.rw; x += 4)
            detail::scc_fwd_block4_f32(in, out, w, bias, d, b, k, y, x, dil, ls);
        }
      }
      for (; x < d.W; ++x) detail::scc_fwd_pixel(in, out, w, bias, d, b, k, y, x, dil, ls);
    }
  });
}

/// Gather form of the input gradient: for input level j and position (u,t),
/// sum over the output levels k = j - l that reach it. wt is the weight bank
/// transposed to [l, dy, dx, o, c].
template <class T>
void scc_backward_input(const T* gout, T* gin, const T* wt, const SccDims& d) {
  const long kh = 2 * d.rh + 1, kw = 2 * d.rw + 1;
  parallel_for(static_cast<std::size_t>(d.B * d.S * d.H), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t row = lo; row < hi; ++row) {
      const long b = static_cast<long>(row) / (d.S * d.H);
      const long j = (static_cast<long>(row) / d.H) % d.S;
      const long u = static_cast<long>(row) % d.H;
      for (long t = 0; t < d.W; ++t) {
        T acc[512];
        for (long c = 0; c < d.Ci; ++c) acc[c] = T(0);
        for (long l = 0; l < d.Ks; ++l) {
          const long k = j - l;
          if (k < 0) break;
          const long dil = ipow(d.gamma, static_cast<int>(k));
          const T* glvl = gout + ((b * d.S + k) * d.H) * d.W * d.Co;
          const T* wl = wt + l * kh * kw * d.Co * d.Ci;
          for (long dy = -d.rh; dy <= d.rh; ++dy) {
            const long y = u - dil * dy;
            if (y < 0 || y >= d.H) continue;
            for (long dx = -d.rw; dx <= d.rw; ++dx) {
              const long x = t - dil * dx;
              if (x < 0 || x >= d.W) continue;
              const T* gp = glvl + (y * d.W + x) * d.Co;
              const T* wp = wl + (((dy + d.rh) * kw) + (dx + d.rw)) * d.Co * d.Ci;
              for (long o = 0; o < d.Co; ++o) {
                const T g = gp[o];
                const T* wr = wp + o * d.Ci;
#pragma GCC ivdep
                for (long c = 0; c < d.Ci; ++c) acc[c] += g * wr[c];
              }
            }
          }
        }
        T* ip = gin + (((b * d.S + j) * d.H + u) * d.W + t) * d.Ci;
#pragma GCC ivdep
        for (long c = 0; c < d.Ci; ++c) ip[c] += acc[c];
      }
    }
  });
}

/// Weight and bias gradients, accumulated over a fixed chunk grid of rows so
/// the reduction order is independent of the worker count.
template <class T>
void scc_backward_weights(const T* in, const T* gout, T* gw, T* gbias, const SccDims& d) {
  const long kh = 2 * d.rh + 1, kw = 2 * d.rw + 1;
  const std::size_t wsize = static_cast<std::size_t>(d.Ks * kh * kw * d.Ci * d.Co);
  const std::size_t rows = static_cast<std::size_t>(d.B * d.S * d.H);
  const std::size_t chunks = rows < kReduceChunks ? rows : kReduceChunks;
  std::vector<T> partial(chunks * wsize, T(0));
  std::vector<T> bias_partial(gbias ? chunks * d.Co : 0, T(0));

  parallel_for(chunks, [&](std::size_t clo, std::size_t chi) {
    for (std::size_t ch = clo; ch < chi; ++ch) {
      T* gwp = partial.data() + ch * wsize;
      T* gbp = gbias ? bias_partial.data() + ch * d.Co : nullptr;
      const std::size_t rlo = chunk_begin(rows, ch, chunks);
      const std::size_t rhi = chunk_begin(rows, ch + 1, chunks);
      for (std::size_t row = rlo; row < rhi; ++row) {
        const long b = static_cast<long>(row) / (d.S * d.H);
        const long k = (static_cast<long>(row) / d.H) % d.S;
        const long y = static_cast<long>(row) % d.H;
        const long dil = ipow(d.gamma, static_cast<int>(k));
        const long ls = detail::min_l(d.Ks, d.S - k);
        const T* grow = gout + (((b * d.S + k) * d.H + y) * d.W) * d.Co;
        for (long x = 0; x < d.W; ++x) {
          const T* gp = grow + x * d.Co;
          if (gbp) {
#pragma GCC ivdep
            for (long o = 0; o < d.Co; ++o) gbp[o] += gp[o];
          }
          for (long l = 0; l < ls; ++l) {
            const T* lvl = in + ((b * d.S + k + l) * d.H) * d.W * d.Ci;
            T* wl = gwp + l * kh * kw * d.Ci * d.Co;
            for (long dy = -d.rh; dy <= d.rh; ++dy) {
              const long yy = y + dil * dy;
              if (yy < 0 || yy >= d.H) continue;
              for (long dx = -d.rw; dx <= d.rw; ++dx) {
                const long xx = x + dil * dx;
                if (xx < 0 || xx >= d.W) continue;
                const T* ip = lvl + (yy * d.W + xx) * d.Ci;
                T* wp = wl + (((dy + d.rh) * kw) + (dx + d.rw)) * d.Ci * d.Co;
                for (long c = 0; c < d.Ci; ++c) {
                  const T v = ip[c];
                  T* wr = wp + c * d.Co;
#pragma GCC ivdep
                  for (long o = 0; o < d.Co; ++o) wr[o] += v * gp[o];
                }
              }
            }
          }
        }
      }
    }
  });

  for (std::size_t ch = 0; ch < chunks; ++ch) {
    const T* gwp = partial.data() + ch * wsize;
    for (std::size_t i = 0; i < wsize; ++i) gw[i] += gwp[i];
    if (gbias) {
      const T* gbp = bias_partial.data() + ch * d.Co;
      for (long o = 0; o < d.Co; ++o) gbias[o] += gbp[o];
    }
  }
}

}  // namespace seunet::kern
