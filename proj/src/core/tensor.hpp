#pragma once

#include <cassert>
#include <cstddef>
#include <random>
#include <vector>

namespace qagen {

// Dense row-major matrix of doubles. Row vectors are 1xN tensors.
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

  static Tensor zeros(int r, int c) { return Tensor(r, c); }
  static Tensor filled(int r, int c, double v) {
    Tensor t(r, c);
    std::fill(t.data.begin(), t.data.end(), v);
    return t;
  }
  static Tensor row(std::vector<double> v) {
    Tensor t;
    t.rows = 1;
    t.cols = static_cast<int>(v.size());
    t.data = std::move(v);
    return t;
  }

  double& operator()(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }

  size_t size() const { return data.size(); }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }

  void set_zero() { std::fill(data.begin(), data.end(), 0.0); }

  bool operator==(const Tensor& o) const {
    return rows == o.rows && cols == o.cols && data == o.data;
  }
};

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
  assert(a.same_shape(b));
  double m = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    double d = std::abs(a.data[i] - b.data[i]);
    if (d > m) m = d;
  }
  return m;
}

}  // namespace qagen
