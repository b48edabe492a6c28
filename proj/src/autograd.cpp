// Copyright (c) 2026 the glvc authors
// SPDX-License-Identifier: Apache-2.0

#include "glvc/autograd.hpp"

#include <cmath>

#include "glvc/detmath.hpp"
#include "glvc/kernels.hpp"

namespace glvc {

void Tape::backward(const Value& loss) {
  GLVC_REQUIRE(recording_, "backward with no recorded graph");
  GLVC_REQUIRE(loss && loss->size() == 1, "backward requires a scalar loss");
  loss->ensure_grad();
  loss->grad()[0] = 1.0;
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
}

double round_half_away(double x) { return std::round(x); }

namespace ops {

namespace {

constexpr double kLn2 = 0.6931471805599453094;
constexpr double kProbFloor = 5.9604644775390625e-08;  // 2^-24

void check_same_shape(const Value& a, const Value& b, const char* what) {
  GLVC_REQUIRE(shape_equal(a->shape(), b->shape()),
               std::string(what) + ": shape mismatch " + shape_str(a->shape()) +
                   " vs " + shape_str(b->shape()));
}

Value out_like(const Shape& s, bool needs) {
  auto v = std::make_shared<Tensor>(s);
  v->needs_grad = needs;
  return v;
}

// guard: nothing flowed into out during backward
bool no_grad(const Value& out) { return !out->has_grad(); }

}  // namespace

Value conv2d(Tape& t, const Value& in, const Value& w, const Value& b,
             int stride, int pad) {
  GLVC_REQUIRE(in->rank() == 3 && w->rank() == 4, "conv2d: rank");
  GLVC_REQUIRE(w->dim(2) == w->dim(3) && w->dim(2) % 2 == 1,
               "conv2d: kernel must be square with odd extent");
  GLVC_REQUIRE(stride == 1 || stride == 2, "conv2d: stride must be 1 or 2");
  GLVC_REQUIRE(in->dim(0) == w->dim(1),
               "conv2d: input channels do not match kernel");
  kernels::Conv2dDims d;
  d.ci = in->dim(0);
  d.h = in->dim(1);
  d.w = in->dim(2);
  d.co = w->dim(0);
  d.k = w->dim(2);
  d.stride = stride;
  d.pad = pad;
  d.ho = (d.h + 2 * pad - d.k) / stride + 1;
  d.wo = (d.w + 2 * pad - d.k) / stride + 1;
  GLVC_REQUIRE(d.ho >= 1 && d.wo >= 1, "conv2d: non-positive output extent");
  if (b) GLVC_REQUIRE(b->rank() == 1 && b->dim(0) == d.co, "conv2d: bias");

  bool needs = in->needs_grad || w->needs_grad || (b && b->needs_grad);
  Value out = out_like({d.co, d.ho, d.wo}, needs);
  kernels::conv2d_fwd(d, in->data(), w->data(), b ? b->data() : nullptr,
                      out->data());
  if (t.recording() && needs) {
    t.record([in, w, b, out, d] {
      if (no_grad(out)) return;
      if (in->needs_grad) {
        in->ensure_grad();
        kernels::conv2d_grad_in(d, out->grad(), w->data(), in->grad());
      }
      if (w->needs_grad) {
        w->ensure_grad();
        kernels::conv2d_grad_w(d, out->grad(), in->data(), w->grad());
      }
      if (b && b->needs_grad) {
        b->ensure_grad();
        kernels::conv2d_grad_b(d, out->grad(), b->grad());
      }
    });
  }
  return out;
}

Value conv2d_transpose(Tape& t, const Value& in, const Value& w,
                       const Value& b, int stride, int pad) {
  GLVC_REQUIRE(in->rank() == 3 && w->rank() == 4, "conv2d_transpose: rank");
  GLVC_REQUIRE(w->dim(2) == w->dim(3), "conv2d_transpose: square kernel");
  GLVC_REQUIRE(stride == 1 || stride == 2,
               "conv2d_transpose: stride must be 1 or 2");
  GLVC_REQUIRE(in->dim(0) == w->dim(0),
               "conv2d_transpose: input channels do not match kernel");
  kernels::ConvT2dDims d;
  d.ci = in->dim(0);
  d.h = in->dim(1);
  d.w = in->dim(2);
  d.co = w->dim(1);
  d.k = w->dim(2);
  d.stride = stride;
  d.pad = pad;
  d.ho = (d.h - 1) * stride - 2 * pad + d.k;
  d.wo = (d.w - 1) * stride - 2 * pad + d.k;
  GLVC_REQUIRE(d.ho >= 1 && d.wo >= 1,
               "conv2d_transpose: non-positive output extent");
  if (b) GLVC_REQUIRE(b->rank() == 1 && b->dim(0) == d.co, "convT: bias");

  bool needs = in->needs_grad || w->needs_grad || (b && b->needs_grad);
  Value out = out_like({d.co, d.ho, d.wo}, needs);
  kernels::convt2d_fwd(d, in->data(), w->data(), b ? b->data() : nullptr,
                       out->data());
  if (t.recording() && needs) {
    t.record([in, w, b, out, d] {
      if (no_grad(out)) return;
      if (in->needs_grad) {
        in->ensure_grad();
        kernels::convt2d_grad_in(d, out->grad(), w->data(), in->grad());
      }
      if (w->needs_grad) {
        w->ensure_grad();
        kernels::convt2d_grad_w(d, out->grad(), in->data(), w->grad());
      }
      if (b && b->needs_grad) {
        b->ensure_grad();
        kernels::convt2d_grad_b(d, out->grad(), b->grad());
      }
    });
  }
  return out;
}

Value leaky_relu(Tape& t, const Value& x, double slope) {
  Value out = out_like(x->shape(), x->needs_grad);
  const int64_t n = x->size();
  for (int64_t i = 0; i < n; ++i)
    (*out)[i] = (*x)[i] >= 0.0 ? (*x)[i] : slope * (*x)[i];
  if (t.recording() && x->needs_grad) {
    t.record([x, out, slope] {
      if (no_grad(out)) return;
      x->ensure_grad();
      for (int64_t i = 0; i < x->size(); ++i)
        x->grad()[i] += ((*x)[i] >= 0.0 ? 1.0 : slope) * out->grad()[i];
    });
  }
  return out;
}

Value relu(Tape& t, const Value& x) { return leaky_relu(t, x, 0.0); }

Value sigmoid(Tape& t, const Value& x) {
  Value out = out_like(x->shape(), x->needs_grad);
  for (int64_t i = 0; i < x->size(); ++i)
    (*out)[i] = detmath::sigmoid_det((*x)[i]);
  if (t.recording() && x->needs_grad) {
    t.record([x, out] {
      if (no_grad(out)) return;
      x->ensure_grad();
      for (int64_t i = 0; i < x->size(); ++i) {
        double s = (*out)[i];
        x->grad()[i] += s * (1.0 - s) * out->grad()[i];
      }
    });
  }
  return out;
}

Value tanh_v(Tape& t, const Value& x) {
  Value out = out_like(x->shape(), x->needs_grad);
  for (int64_t i = 0; i < x->size(); ++i)
    (*out)[i] = detmath::tanh_det((*x)[i]);
  if (t.recording() && x->needs_grad) {
    t.record([x, out] {
      if (no_grad(out)) return;
      x->ensure_grad();
      for (int64_t i = 0; i < x->size(); ++i) {
        double v = (*out)[i];
        x->grad()[i] += (1.0 - v * v) * out->grad()[i];
      }
    });
  }
  return out;
}

Value vexp(Tape& t, const Value& x) {
  Value out = out_like(x->shape(), x->needs_grad);
  for (int64_t i = 0; i < x->size(); ++i)
    (*out)[i] = detmath::exp_det((*x)[i]);
  if (t.recording() && x->needs_grad) {
    t.record([x, out] {
      if (no_grad(out)) return;
      x->ensure_grad();
      for (int64_t i = 0; i < x->size(); ++i)
        x->grad()[i] += (*out)[i] * out->grad()[i];
    });
  }
  return out;
}

Value vsoftplus(Tape& t, const Value& x) {
  Value out = out_like(x->shape(), x->needs_grad);
  for (int64_t i = 0; i < x->size(); ++i)
    (*out)[i] = detmath::softplus_det((*x)[i]);
  if (t.recording() && x->needs_grad) {
    t.record([x, out] {
      if (no_grad(out)) return;
      x->ensure_grad();
      for (int64_t i = 0; i < x->size(); ++i)
        x->grad()[i] += detmath::sigmoid_det((*x)[i]) * out->grad()[i];
    });
  }
  return out;
}

Value add(Tape& t, const Value& a, const Value& b) {
  check_same_shape(a, b, "add");
  Value out = out_like(a->shape(), a->needs_grad || b->needs_grad);
  for (int64_t i = 0; i < a->size(); ++i) (*out)[i] = (*a)[i] + (*b)[i];
  if (t.recording() && out->needs_grad) {
    t.record([a, b, out] {
      if (no_grad(out)) return;
      if (a->needs_grad) {
        a->ensure_grad();
        for (int64_t i = 0; i < a->size(); ++i) a->grad()[i] += out->grad()[i];
      }
      if (b->needs_grad) {
        b->ensure_grad();
        for (int64_t i = 0; i < b->size(); ++i) b->grad()[i] += out->grad()[i];
      }
    });
  }
  return out;
}

Value sub(Tape& t, const Value& a, const Value& b) {
  check_same_shape(a, b, "sub");
  Value out = out_like(a->shape(), a->needs_grad || b->needs_grad);
  for (int64_t i = 0; i < a->size(); ++i) (*out)[i] = (*a)[i] - (*b)[i];
  if (t.recording() && out->needs_grad) {
    t.record([a, b, out] {
      if (no_grad(out)) return;
      if (a->needs_grad) {
        a->ensure_grad();
        for (int64_t i = 0; i < a->size(); ++i) a->grad()[i] += out->grad()[i];
      }
      if (b->needs_grad) {
        b->ensure_grad();
        for (int64_t i = 0; i < b->size(); ++i) b->grad()[i] -= out->grad()[i];
      }
    });
  }
  return out;
}

Value mul(Tape& t, const Value& a, const Value& b) {
  check_same_shape(a, b, "mul");
  Value out = out_like(a->shape(), a->needs_grad || b->needs_grad);
  for (int64_t i = 0; i < a->size(); ++i) (*out)[i] = (*a)[i] * (*b)[i];
  if (t.recording() && out->needs_grad) {
    t.record([a, b, out] {
      if (no_grad(out)) return;
      if (a->needs_grad) {
        a->ensure_grad();
        for (int64_t i = 0; i < a->size(); ++i)
          a->grad()[i] += (*b)[i] * out->grad()[i];
      }
      if (b->needs_grad) {
        b->ensure_grad();
        for (int64_t i = 0; i < b->size(); ++i)
          b->grad()[i] += (*a)[i] * out->grad()[i];
      }
    });
  }
  return out;
}

Value scale(Tape& t, const Value& x, double c) {
  Value out = out_like(x->shape(), x->needs_grad);
  for (int64_t i = 0; i < x->size(); ++i) (*out)[i] = c * (*x)[i];
  if (t.recording() && x->needs_grad) {
    t.record([x, out, c] {
      if (no_grad(out)) return;
      x->ensure_grad();
      for (int64_t i = 0; i < x->size(); ++i)
        x->grad()[i] += c * out->grad()[i];
    });
  }
  return out;
}

Value add_const(Tape& t, const Value& x, double c) {
  Value out = out_like(x->shape(), x->needs_grad);
  for (int64_t i = 0; i < x->size(); ++i) (*out)[i] = (*x)[i] + c;
  if (t.recording() && x->needs_grad) {
    t.record([x, out] {
      if (no_grad(out)) return;
      x->ensure_grad();
      for (int64_t i = 0; i < x->size(); ++i) x->grad()[i] += out->grad()[i];
    });
  }
  return out;
}

Value add_sv(Tape& t, const Value& vec, const Value& scalar) {
  GLVC_REQUIRE(scalar->size() == 1, "add_sv: scalar must have one element");
  Value out = out_like(vec->shape(), vec->needs_grad || scalar->needs_grad);
  for (int64_t i = 0; i < vec->size(); ++i)
    (*out)[i] = (*vec)[i] + (*scalar)[0];
  if (t.recording() && out->needs_grad) {
    t.record([vec, scalar, out] {
      if (no_grad(out)) return;
      if (vec->needs_grad) {
        vec->ensure_grad();
        for (int64_t i = 0; i < vec->size(); ++i)
          vec->grad()[i] += out->grad()[i];
      }
      if (scalar->needs_grad) {
        scalar->ensure_grad();
        double acc = 0.0;
        for (int64_t i = 0; i < vec->size(); ++i) acc += out->grad()[i];
        scalar->grad()[0] += acc;
      }
    });
  }
  return out;
}

namespace {
int64_t chan_stride(const Value& x) {
  int64_t s = 1;
  for (int i = 1; i < x->rank(); ++i) s *= x->dim(i);
  return s;
}
}  // namespace

Value mul_chan(Tape& t, const Value& x, const Value& s) {
  GLVC_REQUIRE(s->rank() == 1 && s->dim(0) == x->dim(0),
               "mul_chan: channel mismatch");
  const int64_t cs = chan_stride(x);
  Value out = out_like(x->shape(), x->needs_grad || s->needs_grad);
  for (int c = 0; c < x->dim(0); ++c)
    for (int64_t i = 0; i < cs; ++i)
      (*out)[c * cs + i] = (*x)[c * cs + i] * (*s)[c];
  if (t.recording() && out->needs_grad) {
    t.record([x, s, out, cs] {
      if (no_grad(out)) return;
      if (x->needs_grad) {
        x->ensure_grad();
        for (int c = 0; c < x->dim(0); ++c)
          for (int64_t i = 0; i < cs; ++i)
            x->grad()[c * cs + i] += (*s)[c] * out->grad()[c * cs + i];
      }
      if (s->needs_grad) {
        s->ensure_grad();
        for (int c = 0; c < x->dim(0); ++c) {
          double acc = 0.0;
          for (int64_t i = 0; i < cs; ++i)
            acc += (*x)[c * cs + i] * out->grad()[c * cs + i];
          s->grad()[c] += acc;
        }
      }
    });
  }
  return out;
}

Value div_chan(Tape& t, const Value& x, const Value& s) {
  GLVC_REQUIRE(s->rank() == 1 && s->dim(0) == x->dim(0),
               "div_chan: channel mismatch");
  for (int c = 0; c < s->dim(0); ++c)
    GLVC_REQUIRE((*s)[c] != 0.0, "div_chan: zero divisor");
  const int64_t cs = chan_stride(x);
  Value out = out_like(x->shape(), x->needs_grad || s->needs_grad);
  for (int c = 0; c < x->dim(0); ++c)
    for (int64_t i = 0; i < cs; ++i)
      (*out)[c * cs + i] = (*x)[c * cs + i] / (*s)[c];
  if (t.recording() && out->needs_grad) {
    t.record([x, s, out, cs] {
      if (no_grad(out)) return;
      if (x->needs_grad) {
        x->ensure_grad();
        for (int c = 0; c < x->dim(0); ++c)
          for (int64_t i = 0; i < cs; ++i)
            x->grad()[c * cs + i] += out->grad()[c * cs + i] / (*s)[c];
      }
      if (s->needs_grad) {
        s->ensure_grad();
        for (int c = 0; c < x->dim(0); ++c) {
          double acc = 0.0;
          for (int64_t i = 0; i < cs; ++i)
            acc += (*x)[c * cs + i] * out->grad()[c * cs + i];
          s->grad()[c] -= acc / ((*s)[c] * (*s)[c]);
        }
      }
    });
  }
  return out;
}

Value broadcast_chan(Tape& t, const Value& s, const Shape& shape) {
  GLVC_REQUIRE(s->rank() == 1 && !shape.empty() && shape[0] == s->dim(0),
               "broadcast_chan: channel mismatch");
  Value out = out_like(shape, s->needs_grad);
  const int64_t cs = shape_numel(shape) / shape[0];
  for (int c = 0; c < shape[0]; ++c)
    for (int64_t i = 0; i < cs; ++i) (*out)[c * cs + i] = (*s)[c];
  if (t.recording() && s->needs_grad) {
    t.record([s, out, cs] {
      if (no_grad(out)) return;
      s->ensure_grad();
      for (int c = 0; c < s->dim(0); ++c) {
        double acc = 0.0;
        for (int64_t i = 0; i < cs; ++i) acc += out->grad()[c * cs + i];
        s->grad()[c] += acc;
      }
    });
  }
  return out;
}

Value sum(Tape& t, const Value& x) {
  Value out = out_like({1}, x->needs_grad);
  double acc = 0.0;
  for (int64_t i = 0; i < x->size(); ++i) acc += (*x)[i];
  (*out)[0] = acc;
  if (t.recording() && x->needs_grad) {
    t.record([x, out] {
      if (no_grad(out)) return;
      x->ensure_grad();
      for (int64_t i = 0; i < x->size(); ++i)
        x->grad()[i] += out->grad()[0];
    });
  }
  return out;
}

Value mean(Tape& t, const Value& x) {
  return scale(t, sum(t, x), 1.0 / static_cast<double>(x->size()));
}

Value mse(Tape& t, const Value& a, const Value& b) {
  check_same_shape(a, b, "mse");
  Value out = out_like({1}, a->needs_grad || b->needs_grad);
  const double inv_n = 1.0 / static_cast<double>(a->size());
  double acc = 0.0;
  for (int64_t i = 0; i < a->size(); ++i) {
    double d = (*a)[i] - (*b)[i];
    acc += d * d;
  }
  (*out)[0] = acc * inv_n;
  if (t.recording() && out->needs_grad) {
    t.record([a, b, out, inv_n] {
      if (no_grad(out)) return;
      double go = out->grad()[0];
      if (a->needs_grad) {
        a->ensure_grad();
        for (int64_t i = 0; i < a->size(); ++i)
          a->grad()[i] += 2.0 * ((*a)[i] - (*b)[i]) * inv_n * go;
      }
      if (b->needs_grad) {
        b->ensure_grad();
        for (int64_t i = 0; i < b->size(); ++i)
          b->grad()[i] -= 2.0 * ((*a)[i] - (*b)[i]) * inv_n * go;
      }
    });
  }
  return out;
}

Value l1(Tape& t, const Value& a, const Value& b) {
  check_same_shape(a, b, "l1");
  Value out = out_like({1}, a->needs_grad || b->needs_grad);
  const double inv_n = 1.0 / static_cast<double>(a->size());
  double acc = 0.0;
  for (int64_t i = 0; i < a->size(); ++i) acc += std::fabs((*a)[i] - (*b)[i]);
  (*out)[0] = acc * inv_n;
  if (t.recording() && out->needs_grad) {
    t.record([a, b, out, inv_n] {
      if (no_grad(out)) return;
      double go = out->grad()[0];
      for (int64_t i = 0; i < a->size(); ++i) {
        double d = (*a)[i] - (*b)[i];
        double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
        if (a->needs_grad) {
          a->ensure_grad();
          a->grad()[i] += s * inv_n * go;
        }
        if (b->needs_grad) {
          b->ensure_grad();
          b->grad()[i] -= s * inv_n * go;
        }
      }
    });
  }
  return out;
}

Value chan_mean(Tape& t, const Value& x) {
  const int c_count = x->dim(0);
  const int64_t cs = chan_stride(x);
  Value out = out_like({c_count}, x->needs_grad);
  for (int c = 0; c < c_count; ++c) {
    double acc = 0.0;
    for (int64_t i = 0; i < cs; ++i) acc += (*x)[c * cs + i];
    (*out)[c] = acc / static_cast<double>(cs);
  }
  if (t.recording() && x->needs_grad) {
    t.record([x, out, cs] {
      if (no_grad(out)) return;
      x->ensure_grad();
      for (int c = 0; c < x->dim(0); ++c) {
        double g = out->grad()[c] / static_cast<double>(cs);
        for (int64_t i = 0; i < cs; ++i) x->grad()[c * cs + i] += g;
      }
    });
  }
  return out;
}

Value concat_ch(Tape& t, const std::vector<Value>& xs) {
  GLVC_REQUIRE(!xs.empty(), "concat_ch: empty input list");
  int h = xs[0]->dim(1), w = xs[0]->dim(2);
  int c_total = 0;
  bool needs = false;
  for (const auto& x : xs) {
    GLVC_REQUIRE(x->rank() == 3 && x->dim(1) == h && x->dim(2) == w,
                 "concat_ch: spatial mismatch");
    c_total += x->dim(0);
    needs = needs || x->needs_grad;
  }
  Value out = out_like({c_total, h, w}, needs);
  int64_t off = 0;
  for (const auto& x : xs) {
    for (int64_t i = 0; i < x->size(); ++i) (*out)[off + i] = (*x)[i];
    off += x->size();
  }
  if (t.recording() && needs) {
    t.record([xs, out] {
      if (no_grad(out)) return;
      int64_t off2 = 0;
      for (const auto& x : xs) {
        if (x->needs_grad) {
          x->ensure_grad();
          for (int64_t i = 0; i < x->size(); ++i)
            x->grad()[i] += out->grad()[off2 + i];
        }
        off2 += x->size();
      }
    });
  }
  return out;
}

Value slice_ch(Tape& t, const Value& x, int c0, int c1) {
  GLVC_REQUIRE(x->rank() == 3 && c0 >= 0 && c1 <= x->dim(0) && c0 < c1,
               "slice_ch: bad channel range");
  const int64_t cs = chan_stride(x);
  Value out = out_like({c1 - c0, x->dim(1), x->dim(2)}, x->needs_grad);
  for (int64_t i = 0; i < out->size(); ++i) (*out)[i] = (*x)[c0 * cs + i];
  if (t.recording() && x->needs_grad) {
    t.record([x, out, c0, cs] {
      if (no_grad(out)) return;
      x->ensure_grad();
      for (int64_t i = 0; i < out->size(); ++i)
        x->grad()[c0 * cs + i] += out->grad()[i];
    });
  }
  return out;
}

Value crop_hw(Tape& t, const Value& x, int h, int w) {
  GLVC_REQUIRE(x->rank() == 3 && h <= x->dim(1) && w <= x->dim(2),
               "crop_hw: target larger than source");
  Value out = out_like({x->dim(0), h, w}, x->needs_grad);
  for (int c = 0; c < x->dim(0); ++c)
    for (int y = 0; y < h; ++y)
      for (int xx = 0; xx < w; ++xx) out->at3(c, y, xx) = x->at3(c, y, xx);
  if (t.recording() && x->needs_grad) {
    t.record([x, out, h, w] {
      if (no_grad(out)) return;
      x->ensure_grad();
      for (int c = 0; c < x->dim(0); ++c)
        for (int y = 0; y < h; ++y)
          for (int xx = 0; xx < w; ++xx)
            x->grad()[(static_cast<int64_t>(c) * x->dim(1) + y) * x->dim(2) +
                      xx] += out->grad()[(static_cast<int64_t>(c) * h + y) * w +
                                         xx];
    });
  }
  return out;
}

Value time_slice(Tape& t, const Value& x, int ti) {
  GLVC_REQUIRE(x->rank() == 4 && ti >= 0 && ti < x->dim(1),
               "time_slice: index out of range");
  const int c_count = x->dim(0), tt = x->dim(1), h = x->dim(2), w = x->dim(3);
  const int64_t hw = static_cast<int64_t>(h) * w;
  Value out = out_like({c_count, h, w}, x->needs_grad);
  for (int c = 0; c < c_count; ++c)
    for (int64_t i = 0; i < hw; ++i)
      (*out)[c * hw + i] = (*x)[(static_cast<int64_t>(c) * tt + ti) * hw + i];
  if (t.recording() && x->needs_grad) {
    t.record([x, out, ti, hw, tt] {
      if (no_grad(out)) return;
      x->ensure_grad();
      for (int c = 0; c < x->dim(0); ++c)
        for (int64_t i = 0; i < hw; ++i)
          x->grad()[(static_cast<int64_t>(c) * tt + ti) * hw + i] +=
              out->grad()[c * hw + i];
    });
  }
  return out;
}

Value time_stack(Tape& t, const std::vector<Value>& xs) {
  GLVC_REQUIRE(!xs.empty(), "time_stack: empty input list");
  const int c_count = xs[0]->dim(0), h = xs[0]->dim(1), w = xs[0]->dim(2);
  bool needs = false;
  for (const auto& x : xs) {
    GLVC_REQUIRE(x->rank() == 3 && x->dim(0) == c_count && x->dim(1) == h &&
                     x->dim(2) == w,
                 "time_stack: shape mismatch");
    needs = needs || x->needs_grad;
  }
  const int tt = static_cast<int>(xs.size());
  const int64_t hw = static_cast<int64_t>(h) * w;
  Value out = out_like({c_count, tt, h, w}, needs);
  for (int ti = 0; ti < tt; ++ti)
    for (int c = 0; c < c_count; ++c)
      for (int64_t i = 0; i < hw; ++i)
        (*out)[(static_cast<int64_t>(c) * tt + ti) * hw + i] =
            (*xs[ti])[c * hw + i];
  if (t.recording() && needs) {
    t.record([xs, out, hw, tt] {
      if (no_grad(out)) return;
      for (int ti = 0; ti < tt; ++ti) {
        if (!xs[ti]->needs_grad) continue;
        xs[ti]->ensure_grad();
        for (int c = 0; c < xs[ti]->dim(0); ++c)
          for (int64_t i = 0; i < hw; ++i)
            xs[ti]->grad()[c * hw + i] +=
                out->grad()[(static_cast<int64_t>(c) * tt + ti) * hw + i];
      }
    });
  }
  return out;
}

Value detach(Tape& t, const Value& x) {
  (void)t;
  auto out = std::make_shared<Tensor>(*x);
  out->needs_grad = false;
  out->clear_grad();
  return out;
}

Value quantize_ste(Tape& t, const Value& x) {
  Value out = out_like(x->shape(), x->needs_grad);
  for (int64_t i = 0; i < x->size(); ++i)
    (*out)[i] = round_half_away((*x)[i]);
  if (t.recording() && x->needs_grad) {
    t.record([x, out] {
      if (no_grad(out)) return;
      x->ensure_grad();
      for (int64_t i = 0; i < x->size(); ++i)
        x->grad()[i] += out->grad()[i];
    });
  }
  return out;
}

Value gaussian_bits(Tape& t, const ITensor& q, const Value& mu,
                    const Value& sigma) {
  GLVC_REQUIRE(shape_equal(q.dims, mu->shape()) &&
                   shape_equal(q.dims, sigma->shape()),
               "gaussian_bits: shape mismatch");
  const int64_t n = q.size();
  Value out = out_like({1}, mu->needs_grad || sigma->needs_grad);
  // cache per-element probabilities for backward
  auto probs = std::make_shared<std::vector<double>>(
      t.recording() && out->needs_grad ? static_cast<size_t>(n) : 0u);
  double bits = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    double s = (*sigma)[i];
    double a = (q.v[static_cast<size_t>(i)] + 0.5 - (*mu)[i]) / s;
    double b = (q.v[static_cast<size_t>(i)] - 0.5 - (*mu)[i]) / s;
    double p = detmath::normal_cdf(a) - detmath::normal_cdf(b);
    if (!probs->empty()) (*probs)[static_cast<size_t>(i)] = p;
    bits -= detmath::log2_det(p < kProbFloor ? kProbFloor : p);
  }
  (*out)[0] = bits;
  if (t.recording() && out->needs_grad) {
    // copy of symbols keeps the closure self-contained
    auto qs = std::make_shared<std::vector<int32_t>>(q.v);
    t.record([mu, sigma, out, probs, qs] {
      if (no_grad(out)) return;
      double go = out->grad()[0];
      if (mu->needs_grad) mu->ensure_grad();
      if (sigma->needs_grad) sigma->ensure_grad();
      for (int64_t i = 0; i < mu->size(); ++i) {
        double p = (*probs)[static_cast<size_t>(i)];
        if (p < kProbFloor) continue;  // clamp active: flat
        double s = (*sigma)[i];
        double a = ((*qs)[static_cast<size_t>(i)] + 0.5 - (*mu)[i]) / s;
        double b = ((*qs)[static_cast<size_t>(i)] - 0.5 - (*mu)[i]) / s;
        double pa = detmath::normal_pdf(a);
        double pb = detmath::normal_pdf(b);
        double denom = p * s * kLn2;
        if (mu->needs_grad) mu->grad()[i] += go * (pa - pb) / denom;
        if (sigma->needs_grad)
          sigma->grad()[i] += go * (a * pa - b * pb) / denom;
      }
    });
  }
  return out;
}

Value histogram_bits(Tape& t, const ITensor& q, const Value& logits,
                     int support) {
  const int s_count = 2 * support + 1;
  GLVC_REQUIRE(logits->rank() == 2 && logits->dim(1) == s_count,
               "histogram_bits: logits shape");
  GLVC_REQUIRE(!q.dims.empty() && q.dims[0] == logits->dim(0),
               "histogram_bits: channel mismatch");
  const int c_count = q.dims[0];
  const int64_t per_chan = q.size() / c_count;

  // softmax per channel (deterministic: fixed traversal order)
  auto pm = std::make_shared<std::vector<double>>(
      static_cast<size_t>(c_count) * s_count);
  for (int c = 0; c < c_count; ++c) {
    double mx = (*logits)[c * s_count];
    for (int k = 1; k < s_count; ++k)
      mx = std::max(mx, (*logits)[c * s_count + k]);
    double z = 0.0;
    for (int k = 0; k < s_count; ++k) {
      double e = detmath::exp_det((*logits)[c * s_count + k] - mx);
      (*pm)[static_cast<size_t>(c) * s_count + k] = e;
      z += e;
    }
    for (int k = 0; k < s_count; ++k)
      (*pm)[static_cast<size_t>(c) * s_count + k] /= z;
  }

  // symbol counts per channel bin; out-of-support symbols clamp to the edge.
  // Elements whose probability sits below the floor are flat in the loss and
  // excluded from the gradient.
  auto counts = std::make_shared<std::vector<int64_t>>(
      static_cast<size_t>(c_count) * s_count, 0);
  auto live = std::make_shared<std::vector<int64_t>>(
      static_cast<size_t>(c_count), 0);
  double bits = 0.0;
  for (int c = 0; c < c_count; ++c) {
    for (int64_t i = 0; i < per_chan; ++i) {
      int32_t sym = q.v[static_cast<size_t>(c * per_chan + i)];
      int idx = sym + support;
      if (idx < 0) idx = 0;
      if (idx >= s_count) idx = s_count - 1;
      double p = (*pm)[static_cast<size_t>(c) * s_count + idx];
      if (p >= kProbFloor) {
        (*counts)[static_cast<size_t>(c) * s_count + idx]++;
        (*live)[static_cast<size_t>(c)]++;
      }
      bits -= detmath::log2_det(p < kProbFloor ? kProbFloor : p);
    }
  }
  Value out = out_like({1}, logits->needs_grad);
  (*out)[0] = bits;
  if (t.recording() && logits->needs_grad) {
    t.record([logits, out, pm, counts, live, c_count, s_count] {
      if (no_grad(out)) return;
      double go = out->grad()[0];
      logits->ensure_grad();
      for (int c = 0; c < c_count; ++c) {
        for (int k = 0; k < s_count; ++k) {
          double pk = (*pm)[static_cast<size_t>(c) * s_count + k];
          double g =
              (static_cast<double>((*live)[static_cast<size_t>(c)]) * pk -
               static_cast<double>(
                   (*counts)[static_cast<size_t>(c) * s_count + k])) /
              kLn2;
          logits->grad()[c * s_count + k] += go * g;
        }
      }
    });
  }
  return out;
}

}  // namespace ops

double gaussian_bits_plain(const ITensor& q, const Tensor& mu,
                           const Tensor& sigma) {
  GLVC_REQUIRE(shape_equal(q.dims, mu.shape()) &&
                   shape_equal(q.dims, sigma.shape()),
               "gaussian_bits: shape mismatch");
  double bits = 0.0;
  for (int64_t i = 0; i < q.size(); ++i) {
    double s = sigma[i];
    double a = (q.v[static_cast<size_t>(i)] + 0.5 - mu[i]) / s;
    double b = (q.v[static_cast<size_t>(i)] - 0.5 - mu[i]) / s;
    double p = detmath::normal_cdf(a) - detmath::normal_cdf(b);
    constexpr double kFloor = 5.9604644775390625e-08;
    bits -= detmath::log2_det(p < kFloor ? kFloor : p);
  }
  return bits;
}

}  // namespace glvc
