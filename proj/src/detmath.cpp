// Copyright (c) 2026 the glvc authors
// SPDX-License-Identifier: Apache-2.0

#include "glvc/detmath.hpp"

#include <cmath>
#include <limits>

namespace glvc::detmath {

namespace {

constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kInvLn2 = 1.44269504088896338700e+00;

// e^r on |r| <= 0.3466 by Taylor series, fixed Horner order.
double exp_reduced(double r) {
  // 1/k! for k = 13..2
  static const double c[] = {
      1.6059043836821613e-10, 2.08767569878680989792e-09,
      2.50521083854417187751e-08, 2.75573192239858906526e-07,
      2.75573192239858906526e-06, 2.48015873015873015873e-05,
      1.98412698412698412698e-04, 1.38888888888888888889e-03,
      8.33333333333333333333e-03, 4.16666666666666666667e-02,
      1.66666666666666666667e-01, 5.0e-01};
  double p = c[0];
  for (int i = 1; i < 12; ++i) p = p * r + c[i];
  return 1.0 + r * (1.0 + r * p);
}

}  // namespace

double exp_det(double x) {
  if (x != x) return x;
  if (x > 709.0) return std::numeric_limits<double>::infinity();
  if (x < -745.0) return 0.0;
  // x = k*ln2 + r with |r| <= ln2/2
  double fk = x * kInvLn2;
  int k = static_cast<int>(fk >= 0.0 ? fk + 0.5 : fk - 0.5);
  double r = (x - k * kLn2Hi) - k * kLn2Lo;
  return std::ldexp(exp_reduced(r), k);
}

double log_det(double x) {
  if (x != x) return x;
  if (x <= 0.0) {
    if (x == 0.0) return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (x == std::numeric_limits<double>::infinity()) return x;
  int e = 0;
  double m = std::frexp(x, &e);  // m in [0.5, 1)
  // shift m into [sqrt(0.5), sqrt(2)) so |s| is small
  if (m < 0.70710678118654752440) {
    m *= 2.0;
    e -= 1;
  }
  double s = (m - 1.0) / (m + 1.0);
  double z = s * s;
  // 2*atanh(s) = 2s * (1 + z/3 + z^2/5 + ... ), |s| < 0.1716
  double p = 1.0 / 19.0;
  p = p * z + 1.0 / 17.0;
  p = p * z + 1.0 / 15.0;
  p = p * z + 1.0 / 13.0;
  p = p * z + 1.0 / 11.0;
  p = p * z + 1.0 / 9.0;
  p = p * z + 1.0 / 7.0;
  p = p * z + 1.0 / 5.0;
  p = p * z + 1.0 / 3.0;
  p = p * z + 1.0;
  double lm = 2.0 * s * p;
  return (e * kLn2Hi + lm) + e * kLn2Lo;
}

double log2_det(double x) { return log_det(x) * kInvLn2; }

// W. J. Cody's rational approximations for erf/erfc (SPECFUN CALERF),
// with exp_det supplying the e^{-x^2} factor.
namespace {

const double kCodyA[5] = {3.16112374387056560e+00, 1.13864154151050156e+02,
                          3.77485237685302021e+02, 3.20937758913846947e+03,
                          1.85777706184603153e-01};
const double kCodyB[4] = {2.36012909523441209e+01, 2.44024637934444173e+02,
                          1.28261652607737228e+03, 2.84423683343917062e+03};
const double kCodyC[9] = {5.64188496988670089e-01, 8.88314979438837594e+00,
                          6.61191906371416295e+01, 2.98635138197400131e+02,
                          8.81952221241769090e+02, 1.71204761263407058e+03,
                          2.05107837782607147e+03, 1.23033935479799725e+03,
                          2.15311535474403846e-08};
const double kCodyD[8] = {1.57449261107098347e+01, 1.17693950891312499e+02,
                          5.37181101862009858e+02, 1.62138957456669019e+03,
                          3.29079923573345963e+03, 4.36261909014324716e+03,
                          3.43936767414372164e+03, 1.23033935480374942e+03};
const double kCodyP[6] = {3.05326634961232344e-01, 3.60344899949804439e-01,
                          1.25781726111229246e-01, 1.60837851487422766e-02,
                          6.58749161529837803e-04, 1.63153871373020978e-02};
const double kCodyQ[5] = {2.56852019228982242e+00, 1.87295284992346047e+00,
                          5.27905102951428412e-01, 6.05183413124413191e-02,
                          2.33520497626869185e-03};

double erf_small(double x) {
  // |x| <= 0.46875
  double z = x * x;
  double num = kCodyA[4] * z;
  double den = z;
  for (int i = 0; i < 3; ++i) {
    num = (num + kCodyA[i]) * z;
    den = (den + kCodyB[i]) * z;
  }
  return x * (num + kCodyA[3]) / (den + kCodyB[3]);
}

double erfc_mid(double x) {
  // 0.46875 < x <= 4
  double num = kCodyC[8] * x;
  double den = x;
  for (int i = 0; i < 7; ++i) {
    num = (num + kCodyC[i]) * x;
    den = (den + kCodyD[i]) * x;
  }
  double r = (num + kCodyC[7]) / (den + kCodyD[7]);
  // split x^2 into an exact high part and remainder for a stable e^{-x^2}
  double xhi = std::floor(x * 16.0) / 16.0;
  double del = (x - xhi) * (x + xhi);
  return exp_det(-xhi * xhi) * exp_det(-del) * r;
}

double erfc_large(double x) {
  // x > 4
  if (x >= 26.6) return 0.0;
  double z = 1.0 / (x * x);
  double num = kCodyP[5] * z;
  double den = z;
  for (int i = 0; i < 4; ++i) {
    num = (num + kCodyP[i]) * z;
    den = (den + kCodyQ[i]) * z;
  }
  double r = z * (num + kCodyP[4]) / (den + kCodyQ[4]);
  r = (5.64189583547756287e-01 - r) / x;  // 1/sqrt(pi)
  double xhi = std::floor(x * 16.0) / 16.0;
  double del = (x - xhi) * (x + xhi);
  return exp_det(-xhi * xhi) * exp_det(-del) * r;
}

}  // namespace

double erf_det(double x) {
  double ax = x < 0.0 ? -x : x;
  if (ax <= 0.46875) return erf_small(x);
  double c = ax <= 4.0 ? erfc_mid(ax) : erfc_large(ax);
  double e = 1.0 - c;
  return x < 0.0 ? -e : e;
}

double erfc_det(double x) {
  double ax = x < 0.0 ? -x : x;
  if (ax <= 0.46875) return 1.0 - erf_small(x);
  double c = ax <= 4.0 ? erfc_mid(ax) : erfc_large(ax);
  return x < 0.0 ? 2.0 - c : c;
}

double normal_cdf(double x) {
  // Phi(x) = erfc(-x / sqrt(2)) / 2
  return 0.5 * erfc_det(-x * 7.07106781186547524401e-01);
}

double normal_pdf(double x) {
  return 3.98942280401432677940e-01 * exp_det(-0.5 * x * x);
}

double softplus_det(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return exp_det(x);
  return log_det(1.0 + exp_det(x));
}

double sigmoid_det(double x) {
  if (x >= 0.0) {
    double e = exp_det(-x);
    return 1.0 / (1.0 + e);
  }
  double e = exp_det(x);
  return e / (1.0 + e);
}

double tanh_det(double x) {
  if (x > 20.0) return 1.0;
  if (x < -20.0) return -1.0;
  double e = exp_det(2.0 * x);
  return (e - 1.0) / (e + 1.0);
}

}  // namespace glvc::detmath
