#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <random>

#include "twm/errors.hpp"
#include "twm/solver.hpp"

using namespace twm;

namespace {

// Smooth random input: a few Gaussians with random complex weights.
CVec random_pulse(const TemporalGrid& grid, double lo, double hi, double width, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> pos(lo, hi);
  std::normal_distribution<double> amp;
  CVec out = CVec::Zero(grid.n_t());
  for (int k = 0; k < 4; ++k) {
    const double c = pos(gen);
    const cplx a(amp(gen), amp(gen));
    for (int i = 0; i < grid.n_t(); ++i) {
      const double x = (grid.t(i) - c) / width;
      out[i] += a * std::exp(-0.5 * x * x);
    }
  }
  return out;
}

double rel_diff(const CVec& a, const CVec& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

}  // namespace

TEST_CASE("zero coupling is pure group delay") {
  const RegimeParams params = RegimeParams::with_gamma_bar(2.0, 0.0, 0.0, 1.0, 0.0);
  const auto pump = PumpSpec::gaussian(0.1);
  const auto grid = TemporalGrid::aligned(params, -3.0, 3.5, 0.01);
  FieldState in = FieldState::zeros(grid.n_t());
  in.a_r = random_pulse(grid, -0.5, 0.5, 0.1, 3);
  in.a_s = random_pulse(grid, -0.5, 0.5, 0.1, 4);
  const FieldState out = propagate(params, pump, grid, in);
  CHECK(out.time_offset == 0.0);
  CHECK(out.z == 1.0);
  CHECK((out.a_s - in.a_s).norm() == 0.0);
  const int shift = grid.n_z();
  CHECK(shift == 200);
  for (int i = shift; i < grid.n_t(); ++i) CHECK(out.a_r[i] == in.a_r[i - shift]);
}

TEST_CASE("energy helper") {
  const TemporalGrid grid(-10, 10, 4001, 1);
  FieldState st = FieldState::zeros(grid.n_t());
  CHECK(energy(st, grid) == 0.0);
  for (int i = 0; i < grid.n_t(); ++i) st.a_s[i] = eval_pump(PumpSpec::gaussian(1.0), grid.t(i));
  CHECK(energy(st, grid) == doctest::Approx(1.0).epsilon(1e-10));
  st.a_r = st.a_s;
  CHECK(energy(st, grid) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("energy is conserved under strong coupling") {
  for (auto params : {RegimeParams::with_gamma_bar(2.0, 0.0, 0.0, 1.0, 2.0),
                      RegimeParams::with_gamma_bar(4.0, 0.0, 2.0, 1.0, 1.5),
                      RegimeParams::with_gamma_bar(8.0, 4.0, 6.0, 1.0, 0.8)}) {
    const auto pump = PumpSpec::gaussian(0.3);
    const auto grid = TemporalGrid::default_for(params, pump);
    FieldState in = FieldState::zeros(grid.n_t());
    // Pulses placed where each channel meets the pump.
    const double ps = (params.beta_p() - params.beta_s()) * params.length();
    const double rs = params.beta_rs() * params.length();
    in.a_s = random_pulse(grid, std::min(0.0, ps), std::max(0.0, ps), 0.2, 17);
    in.a_r = random_pulse(grid, std::min(0.0, ps - rs), std::max(0.0, ps - rs), 0.2, 18);
    const FieldState out = propagate(params, pump, grid, in);
    CHECK(energy(out, grid) == doctest::Approx(energy(in, grid)).epsilon(1e-6));
    // Something actually converted.
    CHECK(rel_diff(out.a_s, in.a_s) > 1e-2);
  }
}

TEST_CASE("propagation is linear") {
  const RegimeParams params = RegimeParams::with_gamma_bar(4.0, 0.0, 2.0, 1.0, 1.0);
  const auto pump = PumpSpec::gaussian(0.5);
  const auto grid = TemporalGrid::default_for(params, pump, 512);
  std::mt19937 gen(5);
  std::normal_distribution<double> d;
  FieldState u = FieldState::zeros(grid.n_t()), v = u, w = u;
  u.a_s = random_pulse(grid, 0.0, 2.0, 0.3, 1);
  u.a_r = random_pulse(grid, -2.0, 0.0, 0.3, 2);
  v.a_s = random_pulse(grid, 0.0, 2.0, 0.3, 3);
  v.a_r = random_pulse(grid, -2.0, 0.0, 0.3, 4);
  const cplx alpha(d(gen), d(gen)), beta(d(gen), d(gen));
  w.a_s = alpha * u.a_s + beta * v.a_s;
  w.a_r = alpha * u.a_r + beta * v.a_r;
  const auto pu = propagate(params, pump, grid, u);
  const auto pv = propagate(params, pump, grid, v);
  const auto pw = propagate(params, pump, grid, w);
  CHECK(rel_diff(pw.a_r, alpha * pu.a_r + beta * pv.a_r) < 1e-8);
  CHECK(rel_diff(pw.a_s, alpha * pu.a_s + beta * pv.a_s) < 1e-8);
}

TEST_CASE("frame shift leaves the output unchanged") {
  const RegimeParams params = RegimeParams::with_gamma_bar(4.0, 0.0, 2.0, 1.0, 1.2);
  const auto pump = PumpSpec::gaussian(0.4);
  const auto grid = TemporalGrid::default_for(params, pump, 512);
  FieldState in = FieldState::zeros(grid.n_t());
  in.a_s = random_pulse(grid, 0.0, 2.0, 0.3, 9);
  const auto ref = propagate(params, pump, grid, in);
  for (double c : {-1.5, 0.7, 3.0}) {
    const auto out = propagate(params.shifted(c), pump, grid, in);
    CHECK(out.time_offset == doctest::Approx(ref.time_offset + c * params.length()));
    CHECK(rel_diff(out.a_r, ref.a_r) < 1e-8);
    CHECK(rel_diff(out.a_s, ref.a_s) < 1e-8);
  }
}

TEST_CASE("second order convergence in the step size") {
  const RegimeParams params = RegimeParams::with_gamma_bar(4.0, 0.0, 2.5, 1.0, 1.0);
  const auto pump = PumpSpec::gaussian(0.5);
  auto run = [&](double dt) {
    const auto grid = TemporalGrid::aligned(params, -6.0, 8.0, dt);
    FieldState in = FieldState::zeros(grid.n_t());
    for (int i = 0; i < grid.n_t(); ++i) {
      const double x = (grid.t(i) - 1.0) / 0.4;
      in.a_s[i] = std::exp(-0.5 * x * x);
    }
    const auto out = propagate(params, pump, grid, in);
    // Sample the result at a fixed set of times (every 0.25) for comparison.
    CVec probe(40);
    for (int k = 0; k < 40; ++k) {
      const int i = static_cast<int>(std::lround((-4.0 + 0.25 * k - grid.t_min()) / grid.dt()));
      probe[k] = out.a_r[i];
    }
    return probe;
  };
  const CVec a = run(0.05), b = run(0.025), c = run(0.0125), ref = run(0.003125);
  const double ea = (a - ref).norm(), eb = (b - ref).norm(), ec = (c - ref).norm();
  CHECK(ea / eb > 3.5);
  CHECK(eb / ec > 3.5);
}

TEST_CASE("exactly co-propagating case is a pointwise rotation") {
  const double gamma = 1.3, bp = 1e-3;
  const RegimeParams params(0.0, 0.0, bp, 1.0, gamma);
  const auto pump = PumpSpec::gaussian(1.0);
  const TemporalGrid grid(-12.0, 12.0, 1201, 50);
  FieldState in = FieldState::zeros(grid.n_t());
  for (int i = 0; i < grid.n_t(); ++i) in.a_s[i] = std::exp(-0.5 * std::pow(grid.t(i) / 2.0, 2));
  const auto out = propagate(params, pump, grid, in);
  CVec expect(grid.n_t());
  for (int i = 0; i < grid.n_t(); ++i) {
    // P = (gamma / beta_p) * integral of A_p over [t - beta_p L, t], by Simpson.
    const double t = grid.t(i), a = t - bp, h = bp / 20.0;
    double acc = pump.envelope(a) + pump.envelope(t);
    for (int k = 1; k < 20; ++k) acc += (k % 2 ? 4.0 : 2.0) * pump.envelope(a + k * h);
    const double P = gamma / bp * acc * h / 3.0;
    expect[i] = cplx(0.0, 1.0) * in.a_s[i] * std::sin(P);
  }
  CHECK(rel_diff(out.a_r, expect) < 1e-4);
}

TEST_CASE("unaligned steps use the interpolating drift") {
  const RegimeParams params = RegimeParams::with_gamma_bar(2.0, 0.0, 0.0, 1.0, 0.0);
  const auto pump = PumpSpec::gaussian(0.3);
  const TemporalGrid grid(-4.0, 5.0, 901, 300);  // 2/300 per step = 2/3 cell
  Propagator prop(params, pump, grid);
  CHECK_FALSE(prop.exact_shift());
  FieldState in = FieldState::zeros(grid.n_t());
  for (int i = 0; i < grid.n_t(); ++i) in.a_r[i] = std::exp(-0.5 * std::pow(grid.t(i) / 0.5, 2));
  const auto out = propagate(params, pump, grid, in);
  // Peak arrives at t = beta_r L = 2 (diffused but centered).
  Eigen::Index imax;
  out.a_r.cwiseAbs().maxCoeff(&imax);
  CHECK(grid.t(static_cast<int>(imax)) == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("solver rejects invalid setups") {
  const RegimeParams params = RegimeParams::with_gamma_bar(2.0, 0.0, 0.0, 1.0, 1.0);
  const auto pump = PumpSpec::gaussian(0.3);
  CHECK_THROWS_AS(Propagator(params, pump, TemporalGrid(-4.0, 5.0, 901, 10)), ConfigError);
  const auto grid = TemporalGrid::default_for(params, pump, 256);
  FieldState bad = FieldState::zeros(grid.n_t() - 1);
  CHECK_THROWS_AS(propagate(params, pump, grid, bad), ConfigError);
  FieldState nan = FieldState::zeros(grid.n_t());
  nan.a_s[3] = cplx(std::nan(""), 0.0);
  CHECK_THROWS_AS(propagate(params, pump, grid, nan), DataError);
  CHECK_THROWS_AS(propagate(params, pump, TemporalGrid(-0.2, 0.2, 64, 64), FieldState::zeros(64)), ConfigError);
}
