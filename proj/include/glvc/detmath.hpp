// Copyright (c) 2026 the glvc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Deterministic scalar math. Entropy coding derives fixed-point CDF tables
// from double-precision Gaussian CDF values; to make bitstreams byte-identical
// across platforms these functions avoid libm transcendentals entirely and
// use fixed polynomial/rational evaluation orders (plain IEEE +,-,*,/ and
// exact ldexp/frexp). Accuracy is ~1e-15 relative, verified against libm in
// the test suite.

namespace glvc::detmath {

double exp_det(double x);
double log_det(double x);    // natural log, x > 0
double log2_det(double x);   // x > 0
double erfc_det(double x);
double erf_det(double x);

// Standard normal CDF and PDF.
double normal_cdf(double x);
double normal_pdf(double x);

// log(1 + e^x), gradient-safe for large |x|.
double softplus_det(double x);
double sigmoid_det(double x);
double tanh_det(double x);

}  // namespace glvc::detmath
