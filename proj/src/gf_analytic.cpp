#include "twm/gf_analytic.hpp"

#include <algorithm>
#include <cmath>

#include "twm/bessel.hpp"
#include "twm/errors.hpp"
#include "twm/quadrature.hpp"

namespace twm {

namespace {

constexpr cplx kI{0.0, 1.0};

// Heaviside step with H(0) = 1/2; `scale` sets the tolerance for "on the edge".
double step(double e, double scale) {
  const double tol = 1e-9 * scale;
  if (e > tol) return 1.0;
  if (e < -tol) return 0.0;
  return 0.5;
}

double edge_scale(const RegimeParams& p, double t, double t_in) {
  return 1.0 + std::abs(t) + std::abs(t_in) + (std::abs(p.beta_r()) + std::abs(p.beta_s())) * p.length();
}

void require_walkoff(const RegimeParams& params) {
  if (std::abs(params.beta_rs()) <= kEpsBeta)
    throw RegimeError("kernel needs beta_r != beta_s; use the co-propagating closed form");
}

void require_ssvm(const RegimeParams& params) {
  require_walkoff(params);
  if (std::abs(params.beta_sp()) > kEpsBeta)
    throw RegimeError("exact kernel needs beta_s == beta_p (got beta_s - beta_p = " +
                      std::to_string(params.beta_sp()) + ")");
}

// J1(x) / x, finite at 0.
double j1_over_x(double x) {
  if (std::abs(x) < 1e-4) return 0.5 - x * x / 16.0;
  return bessel_j1(x) / x;
}

// Velocity-matched kernel for beta_rs > 0 written against abstract pump
// accessors, so the beta_rs < 0 case can reuse it through t -> -t.
template <class Amp, class Eta>
cplx ssvm_core(double beta_r, double beta_s, double L, cplx gbar, Amp ap, Eta eta_of, double t, double t_in,
               Block block, double scale) {
  const double tau = t - beta_s * L;
  const double xi = beta_r * L - t + t_in;
  const double h = step(tau - t_in, scale) * step(xi, scale);
  if (h == 0.0) return 0.0;
  const double eta = eta_of(tau, t_in);
  const double g = std::abs(gbar);
  const double x = 2.0 * g * std::sqrt(std::max(eta * xi, 0.0));
  switch (block) {
    case Block::rs: return h * kI * gbar * ap(t_in) * bessel_j0(x);
    case Block::sr: return h * kI * std::conj(gbar) * std::conj(ap(tau)) * bessel_j0(x);
    case Block::rr: return -h * 2.0 * g * g * eta * j1_over_x(x);
    case Block::ss: return -h * 2.0 * g * g * xi * std::conj(ap(tau)) * ap(t_in) * j1_over_x(x);
  }
  return 0.0;
}

Axis lattice_axis(double lo, double hi, double anchor, double dt) {
  const double start = anchor + std::floor((lo - anchor) / dt + 1e-9) * dt;
  const int n = static_cast<int>(std::ceil((hi - start) / dt - 1e-9)) + 1;
  return {start, dt, std::max(n, 2)};
}

void fill(CMat& m, const Axis& out, const Axis& in, const std::function<cplx(double, double)>& f) {
  m.resize(out.size, in.size);
  for (int j = 0; j < in.size; ++j) {
    const double tp = in.at(j);
    for (int i = 0; i < out.size; ++i) m(i, j) = f(out.at(i), tp);
  }
}

}  // namespace

cplx low_ce_gf(const RegimeParams& params, const PumpSpec& pump, double t, double t_in, Block block) {
  require_walkoff(params);
  const double L = params.length();
  const double brs = params.beta_rs(), brp = params.beta_rp(), bsp = params.beta_sp();
  const double far = std::max(params.beta_r(), params.beta_s()) * L;
  const double near = std::min(params.beta_r(), params.beta_s()) * L;
  const double scale = edge_scale(params, t, t_in);
  const double h = step(t_in - (t - far), scale) * step((t - near) - t_in, scale);
  if (h == 0.0) return 0.0;
  const cplx g = params.gamma() / std::abs(brs);
  switch (block) {
    case Block::rs: return h * kI * g * pump((brp * t_in - bsp * (t - params.beta_r() * L)) / brs);
    case Block::sr:
      return h * kI * std::conj(g) * std::conj(pump((brp * (t - params.beta_s() * L) - bsp * t_in) / brs));
    default: throw UnsupportedError("the low-conversion kernel exists for the rs and sr blocks only");
  }
}

cplx low_ce_gf_freq(const RegimeParams& params, const PumpSpec& pump, double omega, double omega_in) {
  require_walkoff(params);
  const double L = params.length();
  const double brs = params.beta_rs();
  const double wbar = (params.beta_rp() * omega - params.beta_sp() * omega_in) / (2.0 * brs);
  const double arg = wbar * brs * L;
  // sin(arg) / (brs * wbar), with its limit L at wbar = 0
  const double sinc = std::abs(arg) < 1e-8 ? L * (1.0 - arg * arg / 6.0) : std::sin(arg) / (brs * wbar);
  return kI * params.gamma() * pump.spectrum(omega - omega_in) * std::polar(1.0, omega * params.beta_r() * L) *
         std::polar(1.0, -arg) * sinc;
}

SsvmVariables ssvm_variables(const RegimeParams& params, const PumpSpec& pump, double t, double t_in) {
  SsvmVariables v{};
  const double L = params.length();
  v.tau = t - params.beta_s() * L;
  v.tau_in = t_in;
  v.zeta = params.beta_r() * L - t;
  v.zeta_in = -t_in;
  v.xi = v.zeta - v.zeta_in;
  v.eta = ssvm_eta(pump, v.tau, v.tau_in);
  return v;
}

double ssvm_eta(const PumpSpec& pump, double tau, double tau_in) {
  if (tau <= tau_in) return 0.0;
  return std::max(pump.intensity_cdf(tau) - pump.intensity_cdf(tau_in), 0.0);
}

cplx ssvm_gf(const RegimeParams& params, const PumpSpec& pump, double t, double t_in, Block block) {
  require_ssvm(params);
  const double L = params.length();
  const double scale = edge_scale(params, t, t_in);
  const cplx gbar = params.gamma() / std::abs(params.beta_rs());
  if (params.beta_rs() > 0) {
    auto ap = [&](double x) { return pump(x); };
    auto eta = [&](double a, double b) { return ssvm_eta(pump, a, b); };
    return ssvm_core(params.beta_r(), params.beta_s(), L, gbar, ap, eta, t, t_in, block, scale);
  }
  // Mirror image: slownesses and times change sign, the pump is reflected.
  auto ap = [&](double x) { return pump(-x); };
  auto eta = [&](double a, double b) { return ssvm_eta(pump, -b, -a); };
  return ssvm_core(-params.beta_r(), -params.beta_s(), L, gbar, ap, eta, -t, -t_in, block, scale);
}

SingularPart ssvm_singular_part(const RegimeParams& params, Block block) {
  require_ssvm(params);
  if (block == Block::rr) return {params.beta_r() * params.length(), 1.0};
  if (block == Block::ss) return {params.beta_s() * params.length(), 1.0};
  throw UnsupportedError("only the rr and ss blocks carry a singular part");
}

KernelAxes kernel_axes(const RegimeParams& params, const PumpSpec& pump, int n_target) {
  require_walkoff(params);
  if (n_target < 8) throw ConfigError("kernel sampling needs at least 8 points per axis");
  const auto [r_lo, r_hi] = interaction_window(params, pump, 'r');
  const auto [s_lo, s_hi] = interaction_window(params, pump, 's');
  const double walk = std::abs(params.beta_rs()) * params.length();
  const double span = std::max(r_hi - r_lo, s_hi - s_lo);
  const int m = std::max(1, static_cast<int>(std::ceil(walk * (n_target - 1) / span - 1e-9)));
  const double dt = walk / m;
  KernelAxes axes;
  axes.in_r = lattice_axis(r_lo, r_hi, pump.center(), dt);
  axes.in_s = lattice_axis(s_lo, s_hi, pump.center(), dt);
  axes.out_r = axes.in_r.shifted(params.beta_r() * params.length());
  axes.out_s = axes.in_s.shifted(params.beta_s() * params.length());
  return axes;
}

namespace {

GreenFunction empty_grid_gf(const KernelAxes& axes) {
  GreenFunction gf;
  gf.form = GfForm::grid;
  gf.in_r = axes.in_r;
  gf.in_s = axes.in_s;
  gf.out_r = axes.out_r;
  gf.out_s = axes.out_s;
  return gf;
}

}  // namespace

GreenFunction sample_low_ce(const RegimeParams& params, const PumpSpec& pump, const KernelAxes& axes) {
  GreenFunction gf = empty_grid_gf(axes);
  fill(gf.rs, axes.out_r, axes.in_s, [&](double t, double tp) { return low_ce_gf(params, pump, t, tp, Block::rs); });
  fill(gf.sr, axes.out_s, axes.in_r, [&](double t, double tp) { return low_ce_gf(params, pump, t, tp, Block::sr); });
  gf.metadata["kernel"] = "low-ce";
  return gf;
}

GreenFunction sample_ssvm(const RegimeParams& params, const PumpSpec& pump, const KernelAxes& axes,
                          bool conversion_only) {
  require_ssvm(params);
  GreenFunction gf = empty_grid_gf(axes);
  fill(gf.rs, axes.out_r, axes.in_s, [&](double t, double tp) { return ssvm_gf(params, pump, t, tp, Block::rs); });
  if (!conversion_only) {
    fill(gf.sr, axes.out_s, axes.in_r, [&](double t, double tp) { return ssvm_gf(params, pump, t, tp, Block::sr); });
    fill(gf.rr, axes.out_r, axes.in_r, [&](double t, double tp) { return ssvm_gf(params, pump, t, tp, Block::rr); });
    fill(gf.ss, axes.out_s, axes.in_s, [&](double t, double tp) { return ssvm_gf(params, pump, t, tp, Block::ss); });
    gf.rr_delta = ssvm_singular_part(params, Block::rr);
    gf.ss_delta = ssvm_singular_part(params, Block::ss);
  }
  gf.metadata["kernel"] = "ssvm-exact";
  return gf;
}

double ecop_angle(const RegimeParams& params, const PumpSpec& pump, double t) {
  const double bps = params.beta_p() - params.beta_s();
  const double L = params.length();
  const double g = std::abs(params.gamma());
  if (std::abs(bps) <= kEpsBeta) return g * pump.envelope(t) * L;
  return g / bps * pump.envelope_integral(t - bps * L, t);
}

FieldState ecop_output(const RegimeParams& params, const PumpSpec& pump, const TemporalGrid& grid,
                       const FieldState& input) {
  if (std::abs(params.beta_rs()) > kEpsBeta)
    throw RegimeError("co-propagating closed form needs beta_r == beta_s");
  if (pump.chirped()) throw UnsupportedError("co-propagating closed form is known for real pumps only");
  if (input.a_r.size() != grid.n_t() || input.a_s.size() != grid.n_t())
    throw ConfigError("input field length does not match grid n_t");
  // A complex coupling enters as exp(+-i arg gamma) on the exchanged terms.
  const double alpha = std::arg(params.gamma());
  const cplx to_r = kI * std::polar(1.0, alpha), to_s = kI * std::polar(1.0, -alpha);
  FieldState out = input;
  for (int i = 0; i < grid.n_t(); ++i) {
    const double P = ecop_angle(params, pump, grid.t(i) + input.time_offset);
    const double c = std::cos(P), s = std::sin(P);
    out.a_r[i] = input.a_r[i] * c + to_r * input.a_s[i] * s;
    out.a_s[i] = input.a_s[i] * c + to_s * input.a_r[i] * s;
  }
  out.z = input.z + params.length();
  out.time_offset = input.time_offset + params.beta_s() * params.length();
  return out;
}

std::vector<LimitRow> ssvm_to_ecop_limit_check(double gamma, double length, const PumpSpec& pump,
                                               const std::function<cplx(double)>& input,
                                               const std::vector<double>& beta_rs_values,
                                               const std::vector<double>& sample_times) {
  if (pump.chirped()) throw UnsupportedError("limit check needs a real pump");
  std::vector<LimitRow> rows;
  for (double brs : beta_rs_values) {
    if (!(brs > 0.0)) throw ConfigError("walk-off values must be positive");
    const double gbar = gamma / brs;
    double num = 0.0, den = 0.0;
    for (double t : sample_times) {
      // Direct quadrature of the conversion integral over t' in [t - beta_r L, t].
      auto integrand = [&](double tp) {
        const double eta = ssvm_eta(pump, t, tp);
        const double xi = brs * length - t + tp;
        return gbar * pump.envelope(tp) * bessel_j0(2.0 * gbar * std::sqrt(std::max(eta * xi, 0.0))) * input(tp);
      };
      const double a = t - brs * length;
      const double re = integrate([&](double tp) { return integrand(tp).real(); }, a, t, 1e-10, 1e-13);
      const double im = integrate([&](double tp) { return integrand(tp).imag(); }, a, t, 1e-10, 1e-13);
      const cplx direct = kI * cplx(re, im);
      const cplx limit = kI * input(a) * std::sin(gamma * length * pump.envelope(a));
      num += std::norm(direct - limit);
      den += std::norm(limit);
    }
    rows.push_back({brs, den > 0.0 ? std::sqrt(num / den) : std::sqrt(num)});
  }
  return rows;
}

double bessel_identity_lhs(double g) {
  const double a = std::abs(g);
  return g * integrate([&](double s) { return bessel_j0(a * std::sqrt(s * (1.0 - s))); }, 0.0, 1.0, 1e-13, 1e-15);
}

Dechirped dechirp_transform(const PumpSpec& pump) {
  return {pump.without_chirp(), pump.chirp(), pump.center()};
}

}  // namespace twm
