#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace twm {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Mat = Eigen::MatrixXd;

/// Tolerance on slowness differences below which two slownesses are
/// considered equal (slowness units).
inline constexpr double kEpsBeta = 1e-12;

/// Uniformly spaced sample positions start + i*step, i in [0, size).
struct Axis {
  double start = 0.0;
  double step = 1.0;
  int size = 0;

  double at(int i) const { return start + step * i; }
  double back() const { return at(size - 1); }
  Vec samples() const;
  Axis shifted(double offset) const { return {start + offset, step, size}; }
};

/// Polynomial phase theta(t) = sum_k coeffs[k] * (t - center)^k applied to
/// the pump as exp[i theta(t)].
struct Chirp {
  std::vector<double> coeffs;

  bool empty() const;
  double operator()(double dt) const;
};

enum class PumpShape { gaussian, hermite_gauss_1, tabulated };

std::string to_string(PumpShape shape);
PumpShape pump_shape_from_string(const std::string& name);

/// Square-normalized pump envelope A_p(t) = P(t) exp[i theta(t)].
///
/// The real amplitude P(t) is one of the closed-form families or a
/// linearly interpolated table; the chirp phase is kept separate so it can
/// be toggled without touching |A_p|.
class PumpSpec {
 public:
  static PumpSpec gaussian(double tau_p, double center = 0.0);
  static PumpSpec hermite_gauss_1(double tau_p, double center = 0.0);
  /// Piecewise-linear table, renormalized so that the interpolant has unit
  /// square norm. Times must be strictly increasing.
  static PumpSpec tabulated(std::vector<double> times, std::vector<double> amplitudes);

  PumpSpec with_chirp(Chirp chirp) const;
  PumpSpec without_chirp() const;

  PumpShape shape() const { return shape_; }
  /// Characteristic duration: tau_p for the closed forms, rms width of
  /// |A_p|^2 for tables.
  double tau_p() const { return tau_p_; }
  double center() const { return center_; }
  const Chirp& chirp() const { return chirp_; }
  bool chirped() const { return !chirp_.empty(); }
  const std::vector<double>& table_times() const { return times_; }
  const std::vector<double>& table_amplitudes() const { return amps_; }

  /// Real amplitude P(t) (signed for the odd Hermite-Gauss pump).
  double envelope(double t) const;
  double phase(double t) const { return chirp_.empty() ? 0.0 : chirp_(t - center_); }
  cplx operator()(double t) const;

  /// Cumulative pump energy, the integral of |A_p|^2 from -inf to t.
  double intensity_cdf(double t) const;
  /// Integral of P(x) over [a, b].
  double envelope_integral(double a, double b) const;
  /// Fourier transform of A_p with kernel exp(+i omega v).
  cplx spectrum(double omega) const;
  /// Interval outside of which |A_p| is negligible (< 1e-13 of its peak).
  std::pair<double, double> support() const;

 private:
  PumpSpec() = default;

  PumpShape shape_ = PumpShape::gaussian;
  double tau_p_ = 1.0;
  double center_ = 0.0;
  Chirp chirp_;
  std::vector<double> times_;
  std::vector<double> amps_;
  std::vector<double> cdf_;  // cumulative |P|^2 at table nodes
};

cplx eval_pump(const PumpSpec& pump, double t);

/// Group slownesses, medium length and coupling of one configuration.
class RegimeParams {
 public:
  RegimeParams(double beta_r, double beta_s, double beta_p, double length, cplx gamma);
  /// Builds the coupling from gamma_bar = gamma / beta_rs.
  static RegimeParams with_gamma_bar(double beta_r, double beta_s, double beta_p,
                                     double length, double gamma_bar);

  double beta_r() const { return beta_r_; }
  double beta_s() const { return beta_s_; }
  double beta_p() const { return beta_p_; }
  double length() const { return length_; }
  cplx gamma() const { return gamma_; }

  double beta_rs() const { return beta_r_ - beta_s_; }
  double beta_rp() const { return beta_r_ - beta_p_; }
  double beta_sp() const { return beta_s_ - beta_p_; }
  /// gamma / beta_rs; throws RegimeError when beta_rs vanishes.
  cplx gamma_bar() const;

  /// Same configuration seen from a frame that adds c to every slowness.
  RegimeParams shifted(double c) const;
  RegimeParams with_gamma(cplx gamma) const;

 private:
  double beta_r_, beta_s_, beta_p_, length_;
  cplx gamma_;
};

/// Uniform time sampling plus the number of z-steps over [0, L].
class TemporalGrid {
 public:
  TemporalGrid(double t_min, double t_max, int n_t, int n_z);

  /// Builds a grid whose spacing is an exact divisor of |beta_rs| L, so the
  /// r-channel walk-off per z-step is one cell. Covers at least [lo, hi].
  static TemporalGrid aligned(const RegimeParams& params, double lo, double hi, double dt_target);

  /// Default grid: n_t points over the interaction supports padded by
  /// 5 tau_p on each side (spacing then aligned to the walk-off).
  static TemporalGrid default_for(const RegimeParams& params, const PumpSpec& pump, int n_t = 1024);

  double t_min() const { return t_min_; }
  double t_max() const { return t_min_ + dt_ * (n_t_ - 1); }
  double dt() const { return dt_; }
  int n_t() const { return n_t_; }
  int n_z() const { return n_z_; }
  double t(int i) const { return t_min_ + dt_ * i; }
  Axis axis() const { return {t_min_, dt_, n_t_}; }

  TemporalGrid with_n_z(int n_z) const;

  /// Throws ConfigError unless the window holds every input and output
  /// support of the process (in the frame co-moving with the s channel),
  /// padded by 5 max(tau_p, pad).
  void check_coverage(const RegimeParams& params, const PumpSpec& pump, double pad = 0.0) const;

 private:
  double t_min_, dt_;
  int n_t_, n_z_;
};

/// Interval [lo, hi] of input times that meet the pump inside the medium,
/// for the r (channel 0) or s (channel 1) channel.
std::pair<double, double> interaction_window(const RegimeParams& params, const PumpSpec& pump,
                                             char channel);

/// Sampled envelopes of the two weak channels.
///
/// Sample i sits at lab time grid.t(i) + time_offset. Inputs carry offset 0;
/// propagated states carry the offset of the s-channel group delay.
struct FieldState {
  CVec a_r;
  CVec a_s;
  double z = 0.0;
  double time_offset = 0.0;

  static FieldState zeros(int n_t);
};

enum class Regime { SSVM, SCuP, CuP, CoP, ECoP, generic };

std::string to_string(Regime regime);

Regime classify_regime(const RegimeParams& params, double eps_beta = kEpsBeta);

/// Orthonormal Hermite-Gauss function of order n and width w centered at
/// `center`, sampled on `axis`.
Vec hermite_gauss_basis(int n, double width, const Axis& axis, double center = 0.0);
Vec hermite_gauss_basis(int n, double width, const TemporalGrid& grid, double center = 0.0);

/// Orders 0..count-1 at arbitrary points (one column per order). No
/// resolution checks.
Mat hermite_gauss_functions(int count, double width, double center, const Vec& points);

/// Largest local wavenumber of Hermite-Gauss order n with width w.
inline double hermite_gauss_bandwidth(int n, double width) {
  return std::sqrt(2.0 * n + 1.0) / width;
}

}  // namespace twm
