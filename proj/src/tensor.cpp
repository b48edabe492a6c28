// Copyright (c) 2026 the glvc authors
// SPDX-License-Identifier: Apache-2.0

#include "glvc/tensor.hpp"

#include <cmath>
#include <sstream>

namespace glvc {

int64_t shape_numel(const Shape& s) {
  int64_t n = 1;
  for (int d : s) {
    GLVC_REQUIRE(d > 0, "tensor extent must be positive");
    n *= d;
  }
  return n;
}

bool shape_equal(const Shape& a, const Shape& b) { return a == b; }

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << "]";
  return os.str();
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : dims_(std::move(shape)), v_(std::move(values)) {
  GLVC_REQUIRE(static_cast<int64_t>(v_.size()) == shape_numel(dims_),
               "tensor data length does not match shape " + shape_str(dims_));
}

Tensor Tensor::full(Shape shape, double value) {
  Tensor t(std::move(shape));
  for (auto& x : t.v_) x = value;
  return t;
}

bool Tensor::all_finite() const {
  for (double x : v_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

Value make_value(Tensor t, bool needs_grad) {
  auto v = std::make_shared<Tensor>(std::move(t));
  v->needs_grad = needs_grad;
  return v;
}

}  // namespace glvc
