#include "twm/linalg.hpp"

#include <lapacke.h>

#include "twm/errors.hpp"

namespace twm {

namespace {

void check_finite(const CMat& a) {
  if (!a.allFinite()) throw DataError("matrix has non-finite entries");
}

}  // namespace

Svd svd(const CMat& a) {
  check_finite(a);
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(m, n);
  Svd out;
  if (k == 0) {
    out.u = CMat(m, 0);
    out.v = CMat(n, 0);
    return out;
  }
  CMat work = a;
  out.s.resize(k);
  out.u.resize(m, k);
  CMat vt(k, n);
  const lapack_int info = LAPACKE_zgesdd(
      LAPACK_COL_MAJOR, 'S', m, n, reinterpret_cast<lapack_complex_double*>(work.data()), m,
      out.s.data(), reinterpret_cast<lapack_complex_double*>(out.u.data()), m,
      reinterpret_cast<lapack_complex_double*>(vt.data()), k);
  if (info != 0) throw NumericalError("SVD failed to converge (zgesdd info " + std::to_string(info) + ")");
  out.v = vt.adjoint();
  return out;
}

Vec singular_values(const CMat& a) {
  check_finite(a);
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(m, n);
  if (k == 0) return Vec(0);
  CMat work = a;
  Vec s(k);
  const lapack_int info =
      LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, reinterpret_cast<lapack_complex_double*>(work.data()), m,
                     s.data(), nullptr, m, nullptr, 1);
  if (info != 0) throw NumericalError("SVD failed to converge (zgesdd info " + std::to_string(info) + ")");
  return s;
}

}  // namespace twm
