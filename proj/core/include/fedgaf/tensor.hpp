#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fedgaf/errors.hpp"

namespace fedgaf {

// Dense row-major tensor. BasicTensor<double> backs the wide-precision
// gradient checks; the trained model itself stores float (Tensor).
template <class T>
struct BasicTensor {
  std::vector<std::size_t> shape;
  std::vector<T> data;

  BasicTensor() = default;

  explicit BasicTensor(std::vector<std::size_t> s)
      : shape(std::move(s)), data(count(shape), T{}) {}

  BasicTensor(std::vector<std::size_t> s, std::vector<T> d)
      : shape(std::move(s)), data(std::move(d)) {
    if (data.size() != count(shape)) {
      throw ShapeError("tensor data length does not match shape");
    }
  }

  static std::size_t count(const std::vector<std::size_t>& s) {
    std::size_t n = 1;
    for (std::size_t d : s) n *= d;
    return n;
  }

  std::size_t size() const { return data.size(); }

  T& operator[](std::size_t i) { return data[i]; }
  const T& operator[](std::size_t i) const { return data[i]; }

  bool same_shape(const BasicTensor& other) const { return shape == other.shape; }

  template <class U>
  BasicTensor<U> cast() const {
    BasicTensor<U> out;
    out.shape = shape;
    out.data.reserve(data.size());
    for (const T& v : data) out.data.push_back(static_cast<U>(v));
    return out;
  }
};

using Tensor = BasicTensor<float>;

template <class T>
void add_into(BasicTensor<T>& dst, const BasicTensor<T>& src) {
  if (!dst.same_shape(src)) throw ShapeError("add_into: shape mismatch");
  for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += src.data[i];
}

inline std::string shape_string(const std::vector<std::size_t>& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  out += ")";
  return out;
}

}  // namespace fedgaf
