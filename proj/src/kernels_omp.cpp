// Copyright (c) 2026 the glvc authors
// SPDX-License-Identifier: Apache-2.0

#include "glvc/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

// OpenMP versions of the gather-form kernels. Work is split across output
// elements only; the per-element accumulation order matches the serial
// reference exactly, so results are bit-identical for any thread count.

namespace glvc::kernels {

namespace {
Mode g_mode = Mode::kParallel;
inline int64_t idx3(int c, int y, int x, int h, int w) {
  return (static_cast<int64_t>(c) * h + y) * w + x;
}
}  // namespace

Mode mode() { return g_mode; }
void set_mode(Mode m) { g_mode = m; }

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

int effective_threads() {
#ifdef _OPENMP
  return g_mode == Mode::kParallel ? omp_get_max_threads() : 1;
#else
  return 1;
#endif
}

namespace parallel {

void conv2d_fwd(const Conv2dDims& d, const double* in, const double* w,
                const double* bias, double* out) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int co = 0; co < d.co; ++co) {
    for (int oy = 0; oy < d.ho; ++oy) {
      for (int ox = 0; ox < d.wo; ++ox) {
        double acc = bias ? bias[co] : 0.0;
        for (int ci = 0; ci < d.ci; ++ci) {
          for (int ky = 0; ky < d.k; ++ky) {
            int iy = oy * d.stride + ky - d.pad;
            if (iy < 0 || iy >= d.h) continue;
            for (int kx = 0; kx < d.k; ++kx) {
              int ix = ox * d.stride + kx - d.pad;
              if (ix < 0 || ix >= d.w) continue;
              acc += in[idx3(ci, iy, ix, d.h, d.w)] *
                     w[((static_cast<int64_t>(co) * d.ci + ci) * d.k + ky) *
                           d.k +
                       kx];
            }
          }
        }
        out[idx3(co, oy, ox, d.ho, d.wo)] = acc;
      }
    }
  }
}

void conv2d_grad_in(const Conv2dDims& d, const double* gout, const double* w,
                    double* gin) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int ci = 0; ci < d.ci; ++ci) {
    for (int iy = 0; iy < d.h; ++iy) {
      for (int ix = 0; ix < d.w; ++ix) {
        double acc = 0.0;
        for (int co = 0; co < d.co; ++co) {
          for (int ky = 0; ky < d.k; ++ky) {
            int ty = iy + d.pad - ky;
            if (ty < 0 || ty % d.stride != 0) continue;
            int oy = ty / d.stride;
            if (oy >= d.ho) continue;
            for (int kx = 0; kx < d.k; ++kx) {
              int tx = ix + d.pad - kx;
              if (tx < 0 || tx % d.stride != 0) continue;
              int ox = tx / d.stride;
              if (ox >= d.wo) continue;
              acc += gout[idx3(co, oy, ox, d.ho, d.wo)] *
                     w[((static_cast<int64_t>(co) * d.ci + ci) * d.k + ky) *
                           d.k +
                       kx];
            }
          }
        }
        gin[idx3(ci, iy, ix, d.h, d.w)] += acc;
      }
    }
  }
}

void conv2d_grad_w(const Conv2dDims& d, const double* gout, const double* in,
                   double* gw) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int co = 0; co < d.co; ++co) {
    for (int ci = 0; ci < d.ci; ++ci) {
      for (int ky = 0; ky < d.k; ++ky) {
        for (int kx = 0; kx < d.k; ++kx) {
          double acc = 0.0;
          for (int oy = 0; oy < d.ho; ++oy) {
            int iy = oy * d.stride + ky - d.pad;
            if (iy < 0 || iy >= d.h) continue;
            for (int ox = 0; ox < d.wo; ++ox) {
              int ix = ox * d.stride + kx - d.pad;
              if (ix < 0 || ix >= d.w) continue;
              acc += gout[idx3(co, oy, ox, d.ho, d.wo)] *
                     in[idx3(ci, iy, ix, d.h, d.w)];
            }
          }
          gw[((static_cast<int64_t>(co) * d.ci + ci) * d.k + ky) * d.k + kx] +=
              acc;
        }
      }
    }
  }
}

void conv2d_grad_b(const Conv2dDims& d, const double* gout, double* gb) {
#pragma omp parallel for schedule(static)
  for (int co = 0; co < d.co; ++co) {
    double acc = 0.0;
    const double* p = gout + static_cast<int64_t>(co) * d.ho * d.wo;
    for (int i = 0; i < d.ho * d.wo; ++i) acc += p[i];
    gb[co] += acc;
  }
}

void convt2d_fwd(const ConvT2dDims& d, const double* in, const double* w,
                 const double* bias, double* out) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int co = 0; co < d.co; ++co) {
    for (int oy = 0; oy < d.ho; ++oy) {
      for (int ox = 0; ox < d.wo; ++ox) {
        double acc = bias ? bias[co] : 0.0;
        for (int ci = 0; ci < d.ci; ++ci) {
          for (int ky = 0; ky < d.k; ++ky) {
            int ty = oy + d.pad - ky;
            if (ty < 0 || ty % d.stride != 0) continue;
            int iy = ty / d.stride;
            if (iy >= d.h) continue;
            for (int kx = 0; kx < d.k; ++kx) {
              int tx = ox + d.pad - kx;
              if (tx < 0 || tx % d.stride != 0) continue;
              int ix = tx / d.stride;
              if (ix >= d.w) continue;
              acc += in[idx3(ci, iy, ix, d.h, d.w)] *
                     w[((static_cast<int64_t>(ci) * d.co + co) * d.k + ky) *
                           d.k +
                       kx];
            }
          }
        }
        out[idx3(co, oy, ox, d.ho, d.wo)] = acc;
      }
    }
  }
}

void convt2d_grad_in(const ConvT2dDims& d, const double* gout, const double* w,
                     double* gin) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int ci = 0; ci < d.ci; ++ci) {
    for (int iy = 0; iy < d.h; ++iy) {
      for (int ix = 0; ix < d.w; ++ix) {
        double acc = 0.0;
        for (int co = 0; co < d.co; ++co) {
          for (int ky = 0; ky < d.k; ++ky) {
            int oy = iy * d.stride + ky - d.pad;
            if (oy < 0 || oy >= d.ho) continue;
            for (int kx = 0; kx < d.k; ++kx) {
              int ox = ix * d.stride + kx - d.pad;
              if (ox < 0 || ox >= d.wo) continue;
              acc += gout[idx3(co, oy, ox, d.ho, d.wo)] *
                     w[((static_cast<int64_t>(ci) * d.co + co) * d.k + ky) *
                           d.k +
                       kx];
            }
          }
        }
        gin[idx3(ci, iy, ix, d.h, d.w)] += acc;
      }
    }
  }
}

void convt2d_grad_w(const ConvT2dDims& d, const double* gout, const double* in,
                    double* gw) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int ci = 0; ci < d.ci; ++ci) {
    for (int co = 0; co < d.co; ++co) {
      for (int ky = 0; ky < d.k; ++ky) {
        for (int kx = 0; kx < d.k; ++kx) {
          double acc = 0.0;
          for (int iy = 0; iy < d.h; ++iy) {
            int oy = iy * d.stride + ky - d.pad;
            if (oy < 0 || oy >= d.ho) continue;
            for (int ix = 0; ix < d.w; ++ix) {
              int ox = ix * d.stride + kx - d.pad;
              if (ox < 0 || ox >= d.wo) continue;
              acc += in[idx3(ci, iy, ix, d.h, d.w)] *
                     gout[idx3(co, oy, ox, d.ho, d.wo)];
            }
          }
          gw[((static_cast<int64_t>(ci) * d.co + co) * d.k + ky) * d.k + kx] +=
              acc;
        }
      }
    }
  }
}

void convt2d_grad_b(const ConvT2dDims& d, const double* gout, double* gb) {
#pragma omp parallel for schedule(static)
  for (int co = 0; co < d.co; ++co) {
    double acc = 0.0;
    const double* p = gout + static_cast<int64_t>(co) * d.ho * d.wo;
    for (int i = 0; i < d.ho * d.wo; ++i) acc += p[i];
    gb[co] += acc;
  }
}

}  // namespace parallel

#define GLVC_DISPATCH(fn, ...)              \
  do {                                      \
    if (g_mode == Mode::kParallel)          \
      parallel::fn(__VA_ARGS__);            \
    else                                    \
      serial::fn(__VA_ARGS__);              \
  } while (0)

void conv2d_fwd(const Conv2dDims& d, const double* in, const double* w,
                const double* bias, double* out) {
  GLVC_DISPATCH(conv2d_fwd, d, in, w, bias, out);
}
void conv2d_grad_in(const Conv2dDims& d, const double* gout, const double* w,
                    double* gin) {
  GLVC_DISPATCH(conv2d_grad_in, d, gout, w, gin);
}
void conv2d_grad_w(const Conv2dDims& d, const double* gout, const double* in,
                   double* gw) {
  GLVC_DISPATCH(conv2d_grad_w, d, gout, in, gw);
}
void conv2d_grad_b(const Conv2dDims& d, const double* gout, double* gb) {
  GLVC_DISPATCH(conv2d_grad_b, d, gout, gb);
}
void convt2d_fwd(const ConvT2dDims& d, const double* in, const double* w,
                 const double* bias, double* out) {
  GLVC_DISPATCH(convt2d_fwd, d, in, w, bias, out);
}
void convt2d_grad_in(const ConvT2dDims& d, const double* gout, const double* w,
                     double* gin) {
  GLVC_DISPATCH(convt2d_grad_in, d, gout, w, gin);
}
void convt2d_grad_w(const ConvT2dDims& d, const double* gout, const double* in,
                    double* gw) {
  GLVC_DISPATCH(convt2d_grad_w, d, gout, in, gw);
}
void convt2d_grad_b(const ConvT2dDims& d, const double* gout, double* gb) {
  GLVC_DISPATCH(convt2d_grad_b, d, gout, gb);
}

#undef GLVC_DISPATCH

}  // namespace glvc::kernels
