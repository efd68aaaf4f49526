#include "twm/bessel.hpp"

#include <cmath>
#include <numbers>

namespace twm {

namespace {

// Power series; long double keeps the cancellation error below 1e-17
// for |x| < 8.
long double series(int order, long double x) {
  const long double q = -0.25L * x * x;
  long double term = order == 0 ? 1.0L : 0.5L * x;
  long double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<long double>(k) * (k + order));
    sum += term;
    if (std::fabs(term) < 1e-22L * std::fabs(sum) + 1e-300L) break;
  }
  return sum;
}

// Miller's backward recurrence normalized by J0 + 2 sum J_2k = 1.
void miller(long double x, long double& j0, long double& j1) {
  int start = static_cast<int>(x + 30.0L + 2.0L * std::sqrt(x * 10.0L));
  start += start % 2;
  long double next = 0.0L, cur = 1e-30L, norm = 0.0L;
  long double out0 = 0.0L, out1 = 0.0L;
  for (int k = start; k >= 1; --k) {
    const long double prev = 2.0L * k / x * cur - next;
    next = cur;
    cur = prev;  // cur now holds J_{k-1}
    if (k - 1 == 1) out1 = cur;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0L * cur;
    if (std::fabs(cur) > 1e250L) {
      next *= 1e-250L;
      cur *= 1e-250L;
      norm *= 1e-250L;
      out1 *= 1e-250L;
    }
  }
  out0 = cur;
  norm += out0;
  j0 = out0 / norm;
  j1 = out1 / norm;
}

// Hankel asymptotic expansion, used for x >= 30 where the terms decrease
// well past double precision.
double hankel(int order, double x) {
  const double mu = 4.0 * order * order;
  const double z8 = 8.0 * x;
  double p = 1.0, q = 0.0;
  double term = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double a = 2.0 * k - 1.0;
    term *= (mu - a * a) / (k * z8);
    if (k % 2 == 1) {
      q += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    } else {
      p += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    }
    if (std::fabs(term) < 1e-17) break;
  }
  const double chi = x - (0.5 * order + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j0(double x) {
  const double ax = std::fabs(x);
  if (ax < 8.0) return static_cast<double>(series(0, ax));
  if (ax < 30.0) {
    long double j0, j1;
    miller(ax, j0, j1);
    return static_cast<double>(j0);
  }
  return hankel(0, ax);
}

double bessel_j1(double x) {
  const double ax = std::fabs(x);
  const double sign = x < 0.0 ? -1.0 : 1.0;
  if (ax < 8.0) return sign * static_cast<double>(series(1, ax));
  if (ax < 30.0) {
    long double j0, j1;
    miller(ax, j0, j1);
    return sign * static_cast<double>(j1);
  }
  return sign * hankel(1, ax);
}

}  // namespace twm
