#pragma once

#include <functional>

namespace twm {

// Adaptive Gauss-Kronrod integration of a real integrand on [a, b].
// Throws NumericalError when the error estimate stays above
// max(abs_tol, rel_tol * |I|).
double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10,
                 double abs_tol = 1e-14);

}  // namespace twm
