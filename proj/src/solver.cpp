#include "twm/solver.hpp"

#include <algorithm>
#include <cmath>

#include "twm/errors.hpp"

namespace twm {

namespace {

struct M2 {
  cplx a, b, c, d;  // [[a, b], [c, d]]

  M2 operator*(const M2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  M2 operator+(const M2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  M2 scaled(double h) const { return {a * h, b * h, c * h, d * h}; }
  static M2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
};

// Per-substep accuracy targets: the pump moves at most a quarter of its
// width and the coupling phase advances at most 0.05 rad.
constexpr double kPumpTravel = 0.25;
constexpr double kPhaseStep = 0.05;

double peak_envelope(const PumpSpec& pump) {
  if (pump.shape() == PumpShape::tabulated) {
    double peak = 0.0;
    for (double a : pump.table_amplitudes()) peak = std::max(peak, std::abs(a));
    return peak;
  }
  const auto [lo, hi] = pump.support();
  double peak = 0.0;
  for (int i = 0; i <= 4000; ++i) peak = std::max(peak, std::abs(pump.envelope(lo + (hi - lo) * i / 4000.0)));
  return peak;
}

}  // namespace

Propagator::Propagator(const RegimeParams& params, const PumpSpec& pump, const TemporalGrid& grid,
                       double input_offset)
    : params_(params), pump_(pump), grid_(grid), input_offset_(input_offset) {
  const double L = params.length();
  dz_ = L / grid.n_z();
  courant_ = params.beta_rs() * dz_ / grid.dt();
  if (std::abs(params.beta_rs()) <= kEpsBeta) {
    exact_shift_ = true;
    shift_ = 0;
  } else if (std::abs(std::abs(courant_) - 1.0) <= 1e-9) {
    exact_shift_ = true;
    shift_ = courant_ > 0 ? 1 : -1;
  } else if (std::abs(courant_) < 1.0) {
    exact_shift_ = false;
    shift_ = 0;
  } else {
    throw ConfigError("step count violates the advection stability limit: |beta_rs| dz / dt = " +
                      std::to_string(std::abs(courant_)) + " > 1 (need n_z >= " +
                      std::to_string(static_cast<long>(std::ceil(std::abs(params.beta_rs()) * L / grid.dt()))) + ")");
  }

  const double half = 0.5 * dz_;
  const double travel = std::abs(params.beta_p() - params.beta_s()) * half / (kPumpTravel * pump.tau_p());
  const double phase = std::abs(params.gamma()) * peak_envelope(pump) * half / kPhaseStep;
  substeps_ = std::max({1, static_cast<int>(std::ceil(travel)), static_cast<int>(std::ceil(phase))});
}

Propagator::Coupling Propagator::coupling(double z0, double h, int substeps) const {
  Coupling out;
  const double bps = params_.beta_p() - params_.beta_s();
  const double origin = grid_.t_min() + input_offset_;
  const auto [s_lo, s_hi] = pump_.support();
  const double lo = s_lo + std::min(bps * z0, bps * (z0 + h));
  const double hi = s_hi + std::max(bps * z0, bps * (z0 + h));
  out.lo = std::clamp(static_cast<int>(std::floor((lo - origin) / grid_.dt())), 0, grid_.n_t());
  out.hi = std::clamp(static_cast<int>(std::ceil((hi - origin) / grid_.dt())) + 1, 0, grid_.n_t());
  const int n = std::max(out.hi - out.lo, 0);
  out.m00.resize(n);
  out.m01.resize(n);
  out.m10.resize(n);
  out.m11.resize(n);

  const cplx ig = cplx(0.0, 1.0) * params_.gamma();
  const cplx igc = cplx(0.0, 1.0) * std::conj(params_.gamma());
  const double hs = h / substeps;
  const M2 id = M2::identity();
  for (int c = 0; c < n; ++c) {
    const double u = origin + grid_.dt() * (out.lo + c);
    auto A = [&](double z) {
      const cplx a = pump_(u - bps * z);
      return M2{0.0, ig * a, igc * std::conj(a), 0.0};
    };
    M2 total = id;
    for (int q = 0; q < substeps; ++q) {
      const double za = z0 + q * hs;
      const M2 a1 = A(za), a2 = A(za + 0.5 * hs), a4 = A(za + hs);
      const M2 k1 = a1;
      const M2 k2 = a2 * (id + k1.scaled(0.5 * hs));
      const M2 k3 = a2 * (id + k2.scaled(0.5 * hs));
      const M2 k4 = a4 * (id + k3.scaled(hs));
      const M2 step = id + (k1 + k2.scaled(2.0) + k3.scaled(2.0) + k4).scaled(hs / 6.0);
      total = step * total;
    }
    out.m00[c] = total.a;
    out.m01[c] = total.b;
    out.m10[c] = total.c;
    out.m11[c] = total.d;
  }
  return out;
}

void Propagator::run(CMat& r, CMat& s) const {
  const int n_t = grid_.n_t();
  const int n_z = grid_.n_z();
  if (r.rows() != n_t || s.rows() != n_t || r.cols() != s.cols())
    throw ConfigError("field arrays do not match the grid (" + std::to_string(n_t) + " samples)");
  const Eigen::Index cols = r.cols();

  // Exact drift keeps r in a longer buffer and moves the window instead of
  // the data: frame cell i at step k lives at buf row i + base(k).
  const int pad = exact_shift_ ? n_z * std::abs(shift_) : 0;
  CMat buf = CMat::Zero(n_t + pad, cols);
  auto base = [&](int k) { return shift_ > 0 ? n_z - k : (shift_ < 0 ? k : 0); };
  buf.middleRows(base(0), n_t) = r;

  auto apply = [&](const Coupling& cp, int k) {
    const int off = base(k);
    for (Eigen::Index j = 0; j < cols; ++j) {
      cplx* pr = buf.col(j).data() + off;
      cplx* ps = s.col(j).data();
      for (int i = cp.lo, c = 0; i < cp.hi; ++i, ++c) {
        const cplx a = pr[i], b = ps[i];
        pr[i] = cp.m00[c] * a + cp.m01[c] * b;
        ps[i] = cp.m10[c] * a + cp.m11[c] * b;
      }
    }
  };

  auto drift = [&]() {
    if (exact_shift_) return;  // handled by base(k)
    const double c = std::abs(courant_);
    for (Eigen::Index j = 0; j < cols; ++j) {
      cplx* p = buf.col(j).data();
      if (courant_ > 0) {
        for (int i = n_t - 1; i > 0; --i) p[i] = (1.0 - c) * p[i] + c * p[i - 1];
        p[0] *= (1.0 - c);
      } else {
        for (int i = 0; i + 1 < n_t; ++i) p[i] = (1.0 - c) * p[i] + c * p[i + 1];
        p[n_t - 1] *= (1.0 - c);
      }
    }
  };

  const double half = 0.5 * dz_;
  apply(coupling(0.0, half, substeps_), 0);
  for (int k = 0; k < n_z; ++k) {
    drift();
    const double z = (k + 0.5) * dz_;
    if (k + 1 < n_z) {
      apply(coupling(z, dz_, 2 * substeps_), k + 1);
    } else {
      apply(coupling(z, half, substeps_), k + 1);
    }
  }
  r = buf.middleRows(base(n_z), n_t);
  if (!r.allFinite() || !s.allFinite()) throw NumericalError("non-finite field values during propagation");
}

FieldState propagate(const RegimeParams& params, const PumpSpec& pump, const TemporalGrid& grid,
                     const FieldState& input) {
  if (input.a_r.size() != grid.n_t() || input.a_s.size() != grid.n_t())
    throw ConfigError("input field length does not match grid n_t");
  if (!input.a_r.allFinite() || !input.a_s.allFinite()) throw DataError("input field has non-finite samples");
  grid.check_coverage(params, pump);
  Propagator prop(params, pump, grid, input.time_offset);
  CMat r = input.a_r, s = input.a_s;
  prop.run(r, s);
  FieldState out;
  out.a_r = r.col(0);
  out.a_s = s.col(0);
  out.z = input.z + params.length();
  out.time_offset = prop.output_offset();
  return out;
}

double energy(const FieldState& state, const TemporalGrid& grid) {
  return grid.dt() * (state.a_r.squaredNorm() + state.a_s.squaredNorm());
}

}  // namespace twm
