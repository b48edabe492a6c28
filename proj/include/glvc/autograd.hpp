// Copyright (c) 2026 the glvc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "glvc/tensor.hpp"

namespace glvc {

// Reverse-mode tape. Ops append backward closures in creation order;
// backward() replays them in reverse, accumulating into Tensor grad buffers.
// A non-recording tape runs the same graph code as pure inference.
class Tape {
 public:
  explicit Tape(bool recording = true) : recording_(recording) {}

  bool recording() const { return recording_; }
  void set_recording(bool r) { recording_ = r; }

  Value leaf(Tensor t, bool needs_grad = false) {
    return make_value(std::move(t), needs_grad);
  }

  void record(std::function<void()> fn) {
    if (recording_) ops_.push_back(std::move(fn));
  }

  void backward(const Value& loss);
  void clear() { ops_.clear(); }
  size_t size() const { return ops_.size(); }

 private:
  bool recording_ = true;
  std::vector<std::function<void()>> ops_;
};

namespace ops {

// -- convolution ------------------------------------------------------------
// in [Ci,H,W], w [Co,Ci,k,k], b [Co] or nullptr; k odd, stride in {1,2}
Value conv2d(Tape& t, const Value& in, const Value& w, const Value& b,
             int stride, int pad);
// in [Ci,H,W], w [Ci,Co,k,k], b [Co] or nullptr; stride in {1,2}
Value conv2d_transpose(Tape& t, const Value& in, const Value& w,
                       const Value& b, int stride, int pad);

// -- elementwise ------------------------------------------------------------
Value leaky_relu(Tape& t, const Value& x, double slope = 0.01);
Value relu(Tape& t, const Value& x);
Value sigmoid(Tape& t, const Value& x);
Value tanh_v(Tape& t, const Value& x);
Value vexp(Tape& t, const Value& x);
Value vsoftplus(Tape& t, const Value& x);
Value add(Tape& t, const Value& a, const Value& b);
Value sub(Tape& t, const Value& a, const Value& b);
Value mul(Tape& t, const Value& a, const Value& b);
Value scale(Tape& t, const Value& x, double c);
Value add_const(Tape& t, const Value& x, double c);
// vector [n] + scalar [1] broadcast
Value add_sv(Tape& t, const Value& vec, const Value& scalar);

// -- channel broadcasts (x: [C,...], s: [C]) --------------------------------
Value mul_chan(Tape& t, const Value& x, const Value& s);
Value div_chan(Tape& t, const Value& x, const Value& s);
Value broadcast_chan(Tape& t, const Value& s, const Shape& shape);

// -- reductions -------------------------------------------------------------
Value sum(Tape& t, const Value& x);
Value mean(Tape& t, const Value& x);
Value mse(Tape& t, const Value& a, const Value& b);
Value l1(Tape& t, const Value& a, const Value& b);
// per-channel mean over all trailing axes: [C,...] -> [C]
Value chan_mean(Tape& t, const Value& x);

// -- structure --------------------------------------------------------------
Value concat_ch(Tape& t, const std::vector<Value>& xs);        // 3D, axis 0
Value slice_ch(Tape& t, const Value& x, int c0, int c1);       // 3D, [c0,c1)
Value crop_hw(Tape& t, const Value& x, int h, int w);          // 3D top-left
Value time_slice(Tape& t, const Value& x, int ti);             // 4D -> 3D
Value time_stack(Tape& t, const std::vector<Value>& xs);       // 3D list -> 4D
Value detach(Tape& t, const Value& x);

// -- quantization -----------------------------------------------------------
// forward: round half away from zero; backward: identity
Value quantize_ste(Tape& t, const Value& x);

// -- rate estimates (bits) --------------------------------------------------
// sum over elements of -log2(Phi((q+.5-mu)/sigma) - Phi((q-.5-mu)/sigma)),
// each term's probability clamped below at 2^-24; differentiable in mu,sigma.
Value gaussian_bits(Tape& t, const ITensor& q, const Value& mu,
                    const Value& sigma);
// q: [C,...] symbols in [-support,support]; logits: [C, 2*support+1]
Value histogram_bits(Tape& t, const ITensor& q, const Value& logits,
                     int support);

}  // namespace ops

// Non-autograd helpers shared with the entropy coder.
double gaussian_bits_plain(const ITensor& q, const Tensor& mu,
                           const Tensor& sigma);
double round_half_away(double x);

}  // namespace glvc
