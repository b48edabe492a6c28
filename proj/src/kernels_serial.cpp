// Copyright (c) 2026 the glvc authors
// SPDX-License-Identifier: Apache-2.0

#include "glvc/kernels.hpp"

namespace glvc::kernels::serial {

namespace {
inline int64_t idx3(int c, int y, int x, int h, int w) {
  return (static_cast<int64_t>(c) * h + y) * w + x;
}
}  // namespace

void conv2d_fwd(const Conv2dDims& d, const double* in, const double* w,
                const double* bias, double* out) {
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
  for (int co = 0; co < d.co; ++co) {
    double acc = 0.0;
    const double* p = gout + static_cast<int64_t>(co) * d.ho * d.wo;
    for (int i = 0; i < d.ho * d.wo; ++i) acc += p[i];
    gb[co] += acc;
  }
}

void convt2d_fwd(const ConvT2dDims& d, const double* in, const double* w,
                 const double* bias, double* out) {
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
  for (int co = 0; co < d.co; ++co) {
    double acc = 0.0;
    const double* p = gout + static_cast<int64_t>(co) * d.ho * d.wo;
    for (int i = 0; i < d.ho * d.wo; ++i) acc += p[i];
    gb[co] += acc;
  }
}

}  // namespace glvc::kernels::serial
