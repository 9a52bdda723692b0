#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "seunet/grid.hpp"
#include "seunet/semigroup.hpp"

namespace seunet {

enum class Interp { kBilinear, kNearest };

/// H x W x C real image, channels last.
template <class T>
struct PlaneImage {
  std::size_t h = 0, w = 0, c = 0;
  std::vector<T> v;

  PlaneImage() = default;
  PlaneImage(std::size_t h_, std::size_t w_, std::size_t c_, T fill = T(0))
      : h(h_), w(w_), c(c_), v(h_ * w_ * c_, fill) {
    if (!h || !w || !c) throw std::invalid_argument("PlaneImage: all extents must be >= 1");
  }

  std::size_t size() const { return v.size(); }
  T& at(std::size_t y, std::size_t x, std::size_t ch) { return v[(y * w + x) * c + ch]; }
  const T& at(std::size_t y, std::size_t x, std::size_t ch) const { return v[(y * w + x) * c + ch]; }

  Grid<T> to_grid() const { return Grid<T>(Shape{h, w, c}, v); }
  static PlaneImage from_grid(const Grid<T>& g) {
    if (g.rank() != 3) throw std::invalid_argument("PlaneImage: grid must be rank 3");
    PlaneImage img(g.dim(0), g.dim(1), g.dim(2));
    img.v = g.data;
    return img;
  }
};

/// Pure decimation action on plane images: out(t) = f(gamma^k t + z). This is
/// the semigroup action (no interpolation, no smoothing); dataset rescaling
/// is plane_rescale below.
template <class T>
PlaneImage<T> plane_subsample_action(const SemigroupElement& g, const PlaneImage<T>& f,
                                     int gamma) {
  check_semigroup_element(g);
  const long step = ipow(gamma, g.k);
  const long h = static_cast<long>(f.h), w = static_cast<long>(f.w);
  if (g.z[0] < 0 || g.z[0] >= h || g.z[1] < 0 || g.z[1] >= w)
    throw std::invalid_argument("plane_subsample_action: empty output, translation " +
                                to_string(g) + " leaves the domain");
  const long oh = (h - 1 - g.z[0]) / step + 1;
  const long ow = (w - 1 - g.z[1]) / step + 1;
  PlaneImage<T> out(oh, ow, f.c);
  for (long y = 0; y < oh; ++y)
    for (long x = 0; x < ow; ++x) {
      const long sy = step * y + g.z[0];
      const long sx = step * x + g.z[1];
      for (std::size_t ch = 0; ch < f.c; ++ch) out.at(y, x, ch) = f.at(sy, sx, ch);
    }
  return out;
}

namespace detail {
// Nearest index with ties resolved downward, so that integer-factor
// upscaling is exact pixel replication.
inline long nearest_index(double src, long n) {
  long i = static_cast<long>(std::floor(src));
  if (src - static_cast<double>(i) > 0.5) ++i;
  if (i < 0) i = 0;
  if (i >= n) i = n - 1;
  return i;
}
}  // namespace detail

/// Rescale with top-left-aligned sampling: output pixel x reads source
/// coordinate x / factor, clamped at the border. Output extent is
/// round(extent * factor) per axis.
template <class T>
PlaneImage<T> plane_rescale(const PlaneImage<T>& f, double factor, Interp mode) {
  if (!(factor > 0)) throw std::invalid_argument("plane_rescale: factor must be > 0");
  const long oh = std::lround(static_cast<double>(f.h) * factor);
  const long ow = std::lround(static_cast<double>(f.w) * factor);
  if (oh < 1 || ow < 1) throw std::invalid_argument("plane_rescale: output extent would be 0");
  const long h = static_cast<long>(f.h), w = static_cast<long>(f.w);
  PlaneImage<T> out(oh, ow, f.c);
  const double inv = 1.0 / factor;
  for (long y = 0; y < oh; ++y) {
    const double sy = static_cast<double>(y) * inv;
    for (long x = 0; x < ow; ++x) {
      const double sx = static_cast<double>(x) * inv;
      if (mode == Interp::kNearest) {
        const long iy = detail::nearest_index(sy, h);
        const long ix = detail::nearest_index(sx, w);
        for (std::size_t ch = 0; ch < f.c; ++ch) out.at(y, x, ch) = f.at(iy, ix, ch);
      } else {
        long y0 = static_cast<long>(std::floor(sy));
        long x0 = static_cast<long>(std::floor(sx));
        double fy = sy - static_cast<double>(y0);
        double fx = sx - static_cast<double>(x0);
        if (y0 < 0) { y0 = 0; fy = 0; }
        if (x0 < 0) { x0 = 0; fx = 0; }
        if (y0 >= h - 1) { y0 = h - 1; fy = 0; }
        if (x0 >= w - 1) { x0 = w - 1; fx = 0; }
        const long y1 = std::min(y0 + 1, h - 1);
        const long x1 = std::min(x0 + 1, w - 1);
        for (std::size_t ch = 0; ch < f.c; ++ch) {
          const double v00 = f.at(y0, x0, ch), v01 = f.at(y0, x1, ch);
          const double v10 = f.at(y1, x0, ch), v11 = f.at(y1, x1, ch);
          const double top = v00 + fx * (v01 - v00);
          const double bot = v10 + fx * (v11 - v10);
          out.at(y, x, ch) = static_cast<T>(top + fy * (bot - top));
        }
      }
    }
  }
  return out;
}

/// Nearest-mode rescale for integer label maps; labels stay categorical.
inline Grid<std::uint8_t> rescale_labels(const Grid<std::uint8_t>& m, double factor) {
  if (m.rank() != 2) throw std::invalid_argument("rescale_labels: label map must be HxW");
  if (!(factor > 0)) throw std::invalid_argument("rescale_labels: factor must be > 0");
  const long h = m.dim(0), w = m.dim(1);
  const long oh = std::lround(h * factor), ow = std::lround(w * factor);
  if (oh < 1 || ow < 1) throw std::invalid_argument("rescale_labels: output extent would be 0");
  Grid<std::uint8_t> out(Shape{static_cast<std::size_t>(oh), static_cast<std::size_t>(ow)});
  const double inv = 1.0 / factor;
  for (long y = 0; y < oh; ++y)
    for (long x = 0; x < ow; ++x)
      out.data[y * ow + x] = m.data[detail::nearest_index(y * inv, h) * w +
                                    detail::nearest_index(x * inv, w)];
  return out;
}

}  // namespace seunet
