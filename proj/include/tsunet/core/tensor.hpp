#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tsunet/core/error.hpp"

namespace tsunet {

inline std::string shape_str(const std::vector<std::size_t>& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

// Dense row-major tensor of reals. Activations are laid out as
// [batch, channels, height, width]; planes as [height, width].
// The element type is the precision switch: double for property tests,
// float for training.
template <typename T>
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s, T fill = T(0))
      : shape(std::move(s)), data(product(shape), fill) {}

  static std::size_t product(const std::vector<std::size_t>& s) {
    std::size_t n = 1;
    for (std::size_t d : s) n *= d;
    return n;
  }

  static Tensor zeros(std::vector<std::size_t> s) { return Tensor(std::move(s)); }
  static Tensor full(std::vector<std::size_t> s, T v) { return Tensor(std::move(s), v); }
  static Tensor scalar(T v) { return Tensor({1}, v); }

  static Tensor from(std::vector<std::size_t> s, std::vector<T> d) {
    if (product(s) != d.size())
      throw ShapeError("Tensor::from: " + shape_str(s) + " does not hold " +
                       std::to_string(d.size()) + " values");
    Tensor t;
    t.shape = std::move(s);
    t.data = std::move(d);
    return t;
  }

  std::size_t numel() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t dim(std::size_t i) const { return shape.at(i); }
  bool same_shape(const Tensor& o) const { return shape == o.shape; }
  bool empty() const { return data.empty(); }

  T& at2(std::size_t r, std::size_t c) { return data[r * shape[1] + c]; }
  const T& at2(std::size_t r, std::size_t c) const { return data[r * shape[1] + c]; }

  T& at4(std::size_t b, std::size_t c, std::size_t y, std::size_t x) {
    return data[((b * shape[1] + c) * shape[2] + y) * shape[3] + x];
  }
  const T& at4(std::size_t b, std::size_t c, std::size_t y, std::size_t x) const {
    return data[((b * shape[1] + c) * shape[2] + y) * shape[3] + x];
  }

  bool all_finite() const {
    for (T v : data)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out;
    out.shape = shape;
    out.data.reserve(data.size());
    for (T v : data) out.data.push_back(static_cast<U>(v));
    return out;
  }
};

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* where) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(where) + ": shape mismatch " + shape_str(a.shape) +
                     " vs " + shape_str(b.shape));
}

}  // namespace tsunet
