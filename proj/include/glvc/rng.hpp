// Copyright (c) 2026 the glvc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace glvc {

// splitmix64: deterministic across platforms, good enough for weight init,
// QP sampling and synthetic data. All project randomness fans out from one
// master seed via derive().
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // uniform integer in [0, n)
  uint64_t next_below(uint64_t n) { return next_u64() % n; }

  int uniform_int(int lo, int hi_incl) {
    return lo + static_cast<int>(next_below(
                    static_cast<uint64_t>(hi_incl - lo + 1)));
  }

  // independent stream for a named purpose
  Rng derive(uint64_t stream_id) const {
    Rng r(state_ ^ (0x6a09e667f3bcc909ULL + stream_id * 0x9e3779b97f4a7c15ULL));
    r.next_u64();
    return r;
  }

 private:
  uint64_t state_;
};

}  // namespace glvc
