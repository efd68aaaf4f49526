#include "twm/quadrature.hpp"

#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "twm/errors.hpp"

namespace twm {

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol, double abs_tol) {
  if (a == b) return 0.0;
  double err = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, rel_tol, &err);
  if (!std::isfinite(value)) throw NumericalError("quadrature produced a non-finite value");
  if (err > std::max(abs_tol, rel_tol * std::abs(value)) * 10.0)
    throw NumericalError("quadrature did not converge (error estimate " + std::to_string(err) + ")");
  return value;
}

}  // namespace twm
