// Copyright (c) 2026 the glvc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "glvc/common.hpp"

namespace glvc {

using Shape = std::vector<int>;

int64_t shape_numel(const Shape& s);
bool shape_equal(const Shape& a, const Shape& b);
std::string shape_str(const Shape& s);

// Dense row-major tensor of doubles with an optional same-shape gradient
// buffer. Everything in this project runs in 64-bit floats.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape)
      : dims_(std::move(shape)), v_(shape_numel(dims_), 0.0) {}
  Tensor(Shape shape, std::vector<double> values);

  static Tensor full(Shape shape, double value);

  const Shape& shape() const { return dims_; }
  int rank() const { return static_cast<int>(dims_.size()); }
  int dim(int i) const { return dims_[static_cast<size_t>(i)]; }
  int64_t size() const { return static_cast<int64_t>(v_.size()); }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  double& operator[](int64_t i) { return v_[static_cast<size_t>(i)]; }
  double operator[](int64_t i) const { return v_[static_cast<size_t>(i)]; }
  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }

  // 3D [C,H,W] and 4D [C,T,H,W] accessors
  double& at3(int c, int y, int x) {
    return v_[(static_cast<size_t>(c) * dims_[1] + y) * dims_[2] + x];
  }
  double at3(int c, int y, int x) const {
    return v_[(static_cast<size_t>(c) * dims_[1] + y) * dims_[2] + x];
  }
  double& at4(int c, int t, int y, int x) {
    return v_[((static_cast<size_t>(c) * dims_[1] + t) * dims_[2] + y) *
                  dims_[3] +
              x];
  }
  double at4(int c, int t, int y, int x) const {
    return v_[((static_cast<size_t>(c) * dims_[1] + t) * dims_[2] + y) *
                  dims_[3] +
              x];
  }

  bool has_grad() const { return !g_.empty(); }
  void ensure_grad() {
    if (g_.empty()) g_.assign(v_.size(), 0.0);
  }
  void clear_grad() { g_.clear(); }
  double* grad() { return g_.data(); }
  const double* grad() const { return g_.data(); }
  std::vector<double>& grad_values() { return g_; }

  bool all_finite() const;

  // Whether backward should propagate gradients into this tensor.
  bool needs_grad = false;

 private:
  Shape dims_;
  std::vector<double> v_;
  std::vector<double> g_;
};

// Integer-valued tensor (quantized symbols).
struct ITensor {
  Shape dims;
  std::vector<int32_t> v;

  ITensor() = default;
  explicit ITensor(Shape shape)
      : dims(std::move(shape)),
        v(static_cast<size_t>(shape_numel(dims)), 0) {}

  int64_t size() const { return static_cast<int64_t>(v.size()); }
};

using Value = std::shared_ptr<Tensor>;

Value make_value(Tensor t, bool needs_grad = false);

}  // namespace glvc
