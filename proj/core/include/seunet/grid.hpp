#pragma once

#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace seunet {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_numel(const Shape& s) {
  std::size_t n = 1;
  for (std::size_t e : s) n *= e;
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

/// Dense row-major array of arbitrary rank. The last axis is the fastest
/// varying one; all image-like grids in this library keep channels last.
template <class T>
struct Grid {
  Shape shape;
  std::vector<T> data;

  Grid() = default;
  explicit Grid(Shape s) : shape(std::move(s)), data(shape_numel(shape), T(0)) {}
  Grid(Shape s, T fill) : shape(std::move(s)), data(shape_numel(shape), fill) {}
  Grid(Shape s, std::vector<T> values) : shape(std::move(s)), data(std::move(values)) {
    if (data.size() != shape_numel(shape))
      throw std::invalid_argument("Grid: value count " + std::to_string(data.size()) +
                                  " does not match shape " + shape_str(shape));
  }

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t dim(std::size_t i) const { return shape.at(i); }

  T* ptr() { return data.data(); }
  const T* ptr() const { return data.data(); }

  // Convenience indexing for cold paths; hot loops index manually.
  template <class... I>
  T& operator()(I... idx) {
    return data[flat_index({static_cast<std::size_t>(idx)...})];
  }
  template <class... I>
  const T& operator()(I... idx) const {
    return data[flat_index({static_cast<std::size_t>(idx)...})];
  }

  std::size_t flat_index(std::initializer_list<std::size_t> idx) const {
    std::size_t f = 0;
    std::size_t a = 0;
    for (std::size_t i : idx) f = f * shape[a++] + i;
    return f;
  }

  bool same_shape(const Grid& o) const { return shape == o.shape; }

  template <class U>
  Grid<U> cast() const {
    Grid<U> out;
    out.shape = shape;
    out.data.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
    return out;
  }
};

}  // namespace seunet
