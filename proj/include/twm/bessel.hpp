#pragma once

namespace twm {

// Bessel functions of the first kind, orders 0 and 1, for real arguments.
// Relative accuracy ~1e-14 away from zeros (absolute ~1e-16 near them).
double bessel_j0(double x);
double bessel_j1(double x);

}  // namespace twm
