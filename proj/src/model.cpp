#include "twm/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "twm/errors.hpp"

namespace twm {

namespace {

constexpr double kPi = std::numbers::pi;

double gauss_norm(double tau) { return std::pow(tau * tau * kPi, -0.25); }

// Support half-widths (in units of tau_p) beyond which the closed-form
// amplitudes drop below 1e-13 of their peak.
constexpr double kGaussianReach = 8.0;
constexpr double kHermite1Reach = 8.5;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ConfigError(std::string(what) + " must be finite");
}

// Integral of (a + (b - a) s)^2 h ds over s in [0, s1].
double segment_square_integral(double a, double b, double h, double s1) {
  const double d = b - a;
  return h * (a * a * s1 + a * d * s1 * s1 + d * d * s1 * s1 * s1 / 3.0);
}

}  // namespace

Vec Axis::samples() const {
  Vec out(size);
  for (int i = 0; i < size; ++i) out[i] = at(i);
  return out;
}

bool Chirp::empty() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c == 0.0; });
}

double Chirp::operator()(double dt) const {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * dt + *it;
  return acc;
}

std::string to_string(PumpShape shape) {
  switch (shape) {
    case PumpShape::gaussian: return "gaussian";
    case PumpShape::hermite_gauss_1: return "hermite-gauss-1";
    case PumpShape::tabulated: return "custom-tabulated";
  }
  return "unknown";
}

PumpShape pump_shape_from_string(const std::string& name) {
  if (name == "gaussian") return PumpShape::gaussian;
  if (name == "hermite-gauss-1" || name == "hg1") return PumpShape::hermite_gauss_1;
  if (name == "custom-tabulated" || name == "tabulated") return PumpShape::tabulated;
  throw ConfigError("unknown pump shape '" + name + "'");
}

PumpSpec PumpSpec::gaussian(double tau_p, double center) {
  require_finite(tau_p, "tau_p");
  require_finite(center, "pump center");
  if (tau_p <= 0.0) throw ConfigError("tau_p must be positive");
  PumpSpec p;
  p.shape_ = PumpShape::gaussian;
  p.tau_p_ = tau_p;
  p.center_ = center;
  return p;
}

PumpSpec PumpSpec::hermite_gauss_1(double tau_p, double center) {
  PumpSpec p = gaussian(tau_p, center);
  p.shape_ = PumpShape::hermite_gauss_1;
  return p;
}

PumpSpec PumpSpec::tabulated(std::vector<double> times, std::vector<double> amplitudes) {
  if (times.size() != amplitudes.size() || times.size() < 2)
    throw ConfigError("tabulated pump needs at least two (time, amplitude) pairs");
  for (std::size_t i = 0; i < times.size(); ++i) {
    require_finite(times[i], "pump table time");
    require_finite(amplitudes[i], "pump table amplitude");
    if (i > 0 && times[i] <= times[i - 1])
      throw ConfigError("pump table times must be strictly increasing");
  }
  double energy = 0.0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    energy += segment_square_integral(amplitudes[i], amplitudes[i + 1], times[i + 1] - times[i], 1.0);
  if (!(energy > 0.0)) throw ConfigError("tabulated pump has zero energy");
  const double scale = 1.0 / std::sqrt(energy);
  for (double& a : amplitudes) a *= scale;

  PumpSpec p;
  p.shape_ = PumpShape::tabulated;
  p.times_ = std::move(times);
  p.amps_ = std::move(amplitudes);
  p.cdf_.assign(p.times_.size(), 0.0);
  for (std::size_t i = 0; i + 1 < p.times_.size(); ++i)
    p.cdf_[i + 1] = p.cdf_[i] + segment_square_integral(p.amps_[i], p.amps_[i + 1],
                                                        p.times_[i + 1] - p.times_[i], 1.0);

  // Mean and rms width of |P|^2; |P|^2 t^k is a polynomial of degree <= 4 on
  // each segment, so 5-point Gauss is exact.
  double mean = 0.0, second = 0.0;
  for (std::size_t i = 0; i + 1 < p.times_.size(); ++i) {
    const double a = p.times_[i], b = p.times_[i + 1];
    const double pa = p.amps_[i], pb = p.amps_[i + 1];
    auto sq = [&](double t) {
      const double v = pa + (pb - pa) * (t - a) / (b - a);
      return v * v;
    };
    mean += boost::math::quadrature::gauss<double, 5>::integrate([&](double t) { return t * sq(t); }, a, b);
    second += boost::math::quadrature::gauss<double, 5>::integrate([&](double t) { return t * t * sq(t); }, a, b);
  }
  p.center_ = mean;
  p.tau_p_ = std::sqrt(std::max(second - mean * mean, 0.0));
  if (!(p.tau_p_ > 0.0)) throw ConfigError("tabulated pump has zero duration");
  return p;
}

PumpSpec PumpSpec::with_chirp(Chirp chirp) const {
  for (double c : chirp.coeffs) require_finite(c, "chirp coefficient");
  PumpSpec p = *this;
  p.chirp_ = std::move(chirp);
  return p;
}

PumpSpec PumpSpec::without_chirp() const {
  PumpSpec p = *this;
  p.chirp_ = Chirp{};
  return p;
}

double PumpSpec::envelope(double t) const {
  switch (shape_) {
    case PumpShape::gaussian: {
      const double x = (t - center_) / tau_p_;
      return gauss_norm(tau_p_) * std::exp(-0.5 * x * x);
    }
    case PumpShape::hermite_gauss_1: {
      const double x = (t - center_) / tau_p_;
      return gauss_norm(tau_p_) * std::numbers::sqrt2 * x * std::exp(-0.5 * x * x);
    }
    case PumpShape::tabulated: {
      if (t < times_.front() || t > times_.back()) return 0.0;
      auto it = std::upper_bound(times_.begin(), times_.end(), t);
      std::size_t i = std::min<std::size_t>(std::distance(times_.begin(), it), times_.size() - 1);
      if (i == 0) i = 1;
      const double s = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
      return amps_[i - 1] + (amps_[i] - amps_[i - 1]) * s;
    }
  }
  return 0.0;
}

cplx PumpSpec::operator()(double t) const {
  const double p = envelope(t);
  if (chirp_.empty()) return {p, 0.0};
  return std::polar(1.0, phase(t)) * p;
}

cplx eval_pump(const PumpSpec& pump, double t) { return pump(t); }

double PumpSpec::intensity_cdf(double t) const {
  switch (shape_) {
    case PumpShape::gaussian: {
      const double x = (t - center_) / tau_p_;
      return 0.5 * std::erfc(-x);
    }
    case PumpShape::hermite_gauss_1: {
      const double x = (t - center_) / tau_p_;
      return 0.5 * std::erfc(-x) - x * std::exp(-x * x) / std::sqrt(kPi);
    }
    case PumpShape::tabulated: {
      if (t <= times_.front()) return 0.0;
      if (t >= times_.back()) return cdf_.back();
      auto it = std::upper_bound(times_.begin(), times_.end(), t);
      const std::size_t i = std::distance(times_.begin(), it);
      const double h = times_[i] - times_[i - 1];
      return cdf_[i - 1] + segment_square_integral(amps_[i - 1], amps_[i], h, (t - times_[i - 1]) / h);
    }
  }
  return 0.0;
}

double PumpSpec::envelope_integral(double a, double b) const {
  switch (shape_) {
    case PumpShape::gaussian: {
      const double xa = (a - center_) / tau_p_, xb = (b - center_) / tau_p_;
      return gauss_norm(tau_p_) * tau_p_ * std::sqrt(kPi / 2.0) *
             (std::erf(xb / std::numbers::sqrt2) - std::erf(xa / std::numbers::sqrt2));
    }
    case PumpShape::hermite_gauss_1: {
      const double xa = (a - center_) / tau_p_, xb = (b - center_) / tau_p_;
      return gauss_norm(tau_p_) * std::numbers::sqrt2 * tau_p_ *
             (std::exp(-0.5 * xa * xa) - std::exp(-0.5 * xb * xb));
    }
    case PumpShape::tabulated: {
      const double sign = a <= b ? 1.0 : -1.0;
      const double lo = std::max(std::min(a, b), times_.front());
      const double hi = std::min(std::max(a, b), times_.back());
      if (hi <= lo) return 0.0;
      // Trapezoid is exact for the linear interpolant; split at the nodes.
      double acc = 0.0;
      double prev = lo;
      auto it = std::upper_bound(times_.begin(), times_.end(), lo);
      for (; it != times_.end() && *it < hi; ++it) {
        acc += 0.5 * (envelope(prev) + envelope(*it)) * (*it - prev);
        prev = *it;
      }
      acc += 0.5 * (envelope(prev) + envelope(hi)) * (hi - prev);
      return sign * acc;
    }
  }
  return 0.0;
}

cplx PumpSpec::spectrum(double omega) const {
  if (chirp_.empty() && shape_ != PumpShape::tabulated) {
    const double s = omega * tau_p_;
    const double gauss = gauss_norm(tau_p_) * tau_p_ * std::sqrt(2.0 * kPi) * std::exp(-0.5 * s * s);
    const cplx shift = std::polar(1.0, omega * center_);
    if (shape_ == PumpShape::gaussian) return gauss * shift;
    return cplx(0.0, std::numbers::sqrt2 * s) * gauss * shift;
  }
  auto re = [&](double v) { return std::real((*this)(v) * std::polar(1.0, omega * v)); };
  auto im = [&](double v) { return std::imag((*this)(v) * std::polar(1.0, omega * v)); };
  if (shape_ == PumpShape::tabulated) {
    double sr = 0.0, si = 0.0;
    for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
      sr += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(re, times_[i], times_[i + 1], 8, 1e-12);
      si += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(im, times_[i], times_[i + 1], 8, 1e-12);
    }
    return {sr, si};
  }
  const auto [lo, hi] = support();
  const double sr = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(re, lo, hi, 15, 1e-12);
  const double si = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(im, lo, hi, 15, 1e-12);
  return {sr, si};
}

std::pair<double, double> PumpSpec::support() const {
  switch (shape_) {
    case PumpShape::gaussian:
      return {center_ - kGaussianReach * tau_p_, center_ + kGaussianReach * tau_p_};
    case PumpShape::hermite_gauss_1:
      return {center_ - kHermite1Reach * tau_p_, center_ + kHermite1Reach * tau_p_};
    case PumpShape::tabulated:
      return {times_.front(), times_.back()};
  }
  return {0.0, 0.0};
}

RegimeParams::RegimeParams(double beta_r, double beta_s, double beta_p, double length, cplx gamma)
    : beta_r_(beta_r), beta_s_(beta_s), beta_p_(beta_p), length_(length), gamma_(gamma) {
  require_finite(beta_r, "beta_r");
  require_finite(beta_s, "beta_s");
  require_finite(beta_p, "beta_p");
  require_finite(length, "L");
  require_finite(gamma.real(), "gamma");
  require_finite(gamma.imag(), "gamma");
  if (length <= 0.0) throw ConfigError("medium length must be positive");
}

RegimeParams RegimeParams::with_gamma_bar(double beta_r, double beta_s, double beta_p, double length,
                                          double gamma_bar) {
  if (std::abs(beta_r - beta_s) <= kEpsBeta)
    throw RegimeError("gamma_bar is undefined when beta_r == beta_s; specify gamma instead");
  return RegimeParams(beta_r, beta_s, beta_p, length, gamma_bar * (beta_r - beta_s));
}

cplx RegimeParams::gamma_bar() const {
  if (std::abs(beta_rs()) <= kEpsBeta)
    throw RegimeError("gamma_bar is undefined when beta_r == beta_s");
  return gamma_ / beta_rs();
}

RegimeParams RegimeParams::shifted(double c) const {
  return RegimeParams(beta_r_ + c, beta_s_ + c, beta_p_ + c, length_, gamma_);
}

RegimeParams RegimeParams::with_gamma(cplx gamma) const {
  return RegimeParams(beta_r_, beta_s_, beta_p_, length_, gamma);
}

TemporalGrid::TemporalGrid(double t_min, double t_max, int n_t, int n_z)
    : t_min_(t_min), dt_(0.0), n_t_(n_t), n_z_(n_z) {
  require_finite(t_min, "t_min");
  require_finite(t_max, "t_max");
  if (n_t < 2) throw ConfigError("grid needs n_t >= 2");
  if (n_z < 1) throw ConfigError("grid needs n_z >= 1");
  dt_ = (t_max - t_min) / (n_t - 1);
  if (!(dt_ > 0.0)) throw ConfigError("grid spacing must be positive (t_max > t_min)");
}

TemporalGrid TemporalGrid::aligned(const RegimeParams& params, double lo, double hi, double dt_target) {
  if (!(dt_target > 0.0) || !(hi > lo)) throw ConfigError("aligned grid needs hi > lo and dt > 0");
  const double walk = std::abs(params.beta_rs()) * params.length();
  double dt = dt_target;
  int n_z = 1;
  if (std::abs(params.beta_rs()) > kEpsBeta) {
    n_z = std::max(1, static_cast<int>(std::ceil(walk / dt_target - 1e-9)));
    dt = walk / n_z;
  } else {
    const double pump_walk = std::abs(params.beta_p() - params.beta_s()) * params.length();
    n_z = std::max(1, static_cast<int>(std::ceil(pump_walk / dt_target - 1e-9)));
  }
  const int n_t = static_cast<int>(std::ceil((hi - lo) / dt - 1e-9)) + 1;
  return TemporalGrid(lo, lo + dt * (n_t - 1), std::max(n_t, 2), n_z);
}

namespace {

// Nominal positions (pump collapsed to its center) that the window must hold,
// in the frame co-moving with the s channel.
std::pair<double, double> nominal_span(const RegimeParams& params, const PumpSpec& pump) {
  const double L = params.length();
  const double c = pump.center();
  const double ps = (params.beta_p() - params.beta_s()) * L;
  const double rs = params.beta_rs() * L;
  const double pts[] = {c, c + ps, c + ps - rs, c + ps, c + rs, c + ps};
  // in_s: [c, c+ps]; in_r: [c, c+ps-rs]; out_r (frame): in_r + rs = [c+rs, c+ps]
  const auto [mn, mx] = std::minmax_element(std::begin(pts), std::end(pts));
  return {*mn, *mx};
}

}  // namespace

TemporalGrid TemporalGrid::default_for(const RegimeParams& params, const PumpSpec& pump, int n_t) {
  if (n_t < 2) throw ConfigError("grid needs n_t >= 2");
  auto [lo, hi] = nominal_span(params, pump);
  const double pad = 5.0 * pump.tau_p();
  if (pump.shape() == PumpShape::tabulated) {
    const auto [s_lo, s_hi] = pump.support();
    lo += s_lo - pump.center();
    hi += s_hi - pump.center();
  }
  lo -= pad;
  hi += pad;
  return aligned(params, lo, hi, (hi - lo) / (n_t - 1));
}

TemporalGrid TemporalGrid::with_n_z(int n_z) const { return TemporalGrid(t_min_, t_max(), n_t_, n_z); }

void TemporalGrid::check_coverage(const RegimeParams& params, const PumpSpec& pump, double pad) const {
  auto [lo, hi] = nominal_span(params, pump);
  const double margin = 5.0 * std::max(pump.tau_p(), pad);
  lo -= margin;
  hi += margin;
  const double slack = 1e-9 * std::max(1.0, hi - lo);
  if (t_min() > lo + slack || t_max() < hi - slack)
    throw ConfigError("time window [" + std::to_string(t_min()) + ", " + std::to_string(t_max()) +
                      "] does not cover the interaction support [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
}

std::pair<double, double> interaction_window(const RegimeParams& params, const PumpSpec& pump,
                                             char channel) {
  const auto [lo, hi] = pump.support();
  const double walk = (channel == 'r' ? -params.beta_rp() : -params.beta_sp()) * params.length();
  return {lo + std::min(0.0, walk), hi + std::max(0.0, walk)};
}

FieldState FieldState::zeros(int n_t) {
  FieldState s;
  s.a_r = CVec::Zero(n_t);
  s.a_s = CVec::Zero(n_t);
  return s;
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::SSVM: return "SSVM";
    case Regime::SCuP: return "SCuP";
    case Regime::CuP: return "CuP";
    case Regime::CoP: return "CoP";
    case Regime::ECoP: return "ECoP";
    case Regime::generic: return "generic";
  }
  return "generic";
}

Regime classify_regime(const RegimeParams& params, double eps_beta) {
  const double rs = params.beta_rs(), rp = params.beta_rp(), sp = params.beta_sp();
  if (std::abs(rs) <= eps_beta) return Regime::ECoP;
  const bool sp_zero = std::abs(sp) <= eps_beta;
  const bool rp_zero = std::abs(rp) <= eps_beta;
  if (sp_zero != rp_zero) return Regime::SSVM;
  if (std::abs(rp + sp) <= eps_beta && !rp_zero) return Regime::SCuP;
  if (sp * rp < 0.0) return Regime::CuP;
  if (sp * rp > 0.0) return Regime::CoP;
  return Regime::generic;
}

Mat hermite_gauss_functions(int count, double width, double center, const Vec& points) {
  Mat out(points.size(), std::max(count, 0));
  if (count <= 0) return out;
  const double norm = std::pow(kPi, -0.25) / std::sqrt(width);
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    const double x = (points[i] - center) / width;
    double prev = norm * std::exp(-0.5 * x * x);
    out(i, 0) = prev;
    if (count == 1) continue;
    double cur = std::numbers::sqrt2 * x * prev;
    out(i, 1) = cur;
    for (int k = 2; k < count; ++k) {
      const double next = std::sqrt(2.0 / k) * x * cur - std::sqrt((k - 1.0) / k) * prev;
      prev = cur;
      cur = next;
      out(i, k) = cur;
    }
  }
  return out;
}

Vec hermite_gauss_basis(int n, double width, const Axis& axis, double center) {
  if (n < 0) throw ConfigError("Hermite-Gauss order must be >= 0");
  if (!(width > 0.0)) throw ConfigError("Hermite-Gauss width must be positive");
  if (hermite_gauss_bandwidth(n, width) * axis.step > 1.0)
    throw ResolutionError("grid spacing " + std::to_string(axis.step) + " cannot resolve Hermite-Gauss order " +
                          std::to_string(n) + " of width " + std::to_string(width));
  const double reach = (std::sqrt(2.0 * n + 1.0) + 3.0) * width;
  if (center - reach < axis.start || center + reach > axis.back())
    throw ResolutionError("time window too narrow for Hermite-Gauss order " + std::to_string(n));
  return hermite_gauss_functions(n + 1, width, center, axis.samples()).col(n);
}

Vec hermite_gauss_basis(int n, double width, const TemporalGrid& grid, double center) {
  return hermite_gauss_basis(n, width, grid.axis(), center);
}

}  // namespace twm
