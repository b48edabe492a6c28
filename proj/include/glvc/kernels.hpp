// Copyright (c) 2026 the glvc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Convolution kernels, the hot loops of the whole artifact. Each kernel has a
// serial reference implementation and an OpenMP variant. Both are written in
// gather form (every output element is accumulated by exactly one thread in a
// fixed order), so results are bit-identical regardless of mode or thread
// count; the test suite asserts that and tools/bench_kernels compares speed.
//
// Gradient kernels accumulate (+=) into their destination buffers.

namespace glvc::kernels {

enum class Mode { kSerial, kParallel };

Mode mode();
void set_mode(Mode m);
void set_threads(int n);  // 0 = implementation default
int effective_threads();

struct Conv2dDims {
  int ci, h, w;   // input
  int co, k;      // kernel (square, layout [co,ci,k,k])
  int stride, pad;
  int ho, wo;     // output
};

// out = conv(in, w) + bias (bias may be null)
void conv2d_fwd(const Conv2dDims& d, const double* in, const double* w,
                const double* bias, double* out);
void conv2d_grad_in(const Conv2dDims& d, const double* gout, const double* w,
                    double* gin);
void conv2d_grad_w(const Conv2dDims& d, const double* gout, const double* in,
                   double* gw);
void conv2d_grad_b(const Conv2dDims& d, const double* gout, double* gb);

struct ConvT2dDims {
  int ci, h, w;   // input
  int co, k;      // kernel (square, layout [ci,co,k,k])
  int stride, pad;
  int ho, wo;     // output: (h-1)*stride - 2*pad + k
};

void convt2d_fwd(const ConvT2dDims& d, const double* in, const double* w,
                 const double* bias, double* out);
void convt2d_grad_in(const ConvT2dDims& d, const double* gout, const double* w,
                     double* gin);
void convt2d_grad_w(const ConvT2dDims& d, const double* gout, const double* in,
                    double* gw);
void convt2d_grad_b(const ConvT2dDims& d, const double* gout, double* gb);

// Serial reference implementations, kept callable for tests and benchmarks.
namespace serial {
void conv2d_fwd(const Conv2dDims& d, const double* in, const double* w,
                const double* bias, double* out);
void conv2d_grad_in(const Conv2dDims& d, const double* gout, const double* w,
                    double* gin);
void conv2d_grad_w(const Conv2dDims& d, const double* gout, const double* in,
                   double* gw);
void conv2d_grad_b(const Conv2dDims& d, const double* gout, double* gb);
void convt2d_fwd(const ConvT2dDims& d, const double* in, const double* w,
                 const double* bias, double* out);
void convt2d_grad_in(const ConvT2dDims& d, const double* gout, const double* w,
                     double* gin);
void convt2d_grad_w(const ConvT2dDims& d, const double* gout, const double* in,
                    double* gw);
void convt2d_grad_b(const ConvT2dDims& d, const double* gout, double* gb);
}  // namespace serial

namespace parallel {
void conv2d_fwd(const Conv2dDims& d, const double* in, const double* w,
                const double* bias, double* out);
void conv2d_grad_in(const Conv2dDims& d, const double* gout, const double* w,
                    double* gin);
void conv2d_grad_w(const Conv2dDims& d, const double* gout, const double* in,
                   double* gw);
void conv2d_grad_b(const Conv2dDims& d, const double* gout, double* gb);
void convt2d_fwd(const ConvT2dDims& d, const double* in, const double* w,
                 const double* bias, double* out);
void convt2d_grad_in(const ConvT2dDims& d, const double* gout, const double* w,
                     double* gin);
void convt2d_grad_w(const ConvT2dDims& d, const double* gout, const double* in,
                    double* gw);
void convt2d_grad_b(const ConvT2dDims& d, const double* gout, double* gb);
}  // namespace parallel

}  // namespace glvc::kernels
