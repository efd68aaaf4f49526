#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <numbers>
#include <random>

#include "twm/errors.hpp"
#include "twm/gf_analytic.hpp"
#include "twm/linalg.hpp"
#include "twm/schmidt.hpp"
#include "twm/solver.hpp"

using namespace twm;

namespace {

// 20-point Gauss-Legendre on [a, b], panels of equal size. Nodes and
// weights computed by Newton iteration on P_20.
double gauss_legendre(const std::function<double(double)>& f, double a, double b, int panels) {
  static std::vector<double> x, w;
  if (x.empty()) {
    const int n = 20;
    for (int i = 1; i <= n; ++i) {
      double z = std::cos(std::numbers::pi * (i - 0.25) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x.push_back(z);
      w.push_back(2.0 / ((1.0 - z * z) * dp * dp));
    }
  }
  double acc = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * f(lo + 0.5 * h * (x[i] + 1.0));
  }
  return acc * 0.5 * h;
}

}  // namespace

TEST_CASE("low-conversion kernel support and scaling") {
  const RegimeParams p = RegimeParams::with_gamma_bar(1.0, -1.0, 1.0, 1.0, 0.01);
  const auto pump = PumpSpec::gaussian(1.0);
  // Band: t' in [t - 1, t + 1].
  CHECK(low_ce_gf(p, pump, 0.0, 1.5, Block::rs) == cplx(0.0));
  CHECK(low_ce_gf(p, pump, 0.0, -1.2, Block::rs) == cplx(0.0));
  CHECK(std::abs(low_ce_gf(p, pump, 0.0, 0.3, Block::rs)) > 0.0);
  CHECK(std::abs(low_ce_gf(p, pump, 0.0, 1.0, Block::rs)) ==
        doctest::Approx(0.5 * std::abs(low_ce_gf(p, pump, 0.0, 1.0 - 1e-7, Block::rs))).epsilon(1e-6));
  const RegimeParams p2 = p.with_gamma(2.0 * p.gamma());
  for (double t : {-0.5, 0.0, 0.8})
    CHECK(std::abs(low_ce_gf(p2, pump, t, 0.2, Block::rs) - 2.0 * low_ce_gf(p, pump, t, 0.2, Block::rs)) < 1e-15);
  CHECK_THROWS_AS(low_ce_gf(RegimeParams(1, 1, 0, 1, 1), pump, 0, 0, Block::rs), RegimeError);
  CHECK_THROWS_AS(low_ce_gf(p, pump, 0, 0, Block::rr), UnsupportedError);
}

TEST_CASE("low-conversion kernel equals first-order perturbation of the equations") {
  // Oracle: A_r(L, t) = i gamma int_0^L A_p(t - beta_r L + beta_rp z) A_s(0, t - beta_r L + beta_rs z) dz.
  for (auto p : {RegimeParams(8.0, 4.0, 6.0, 1.0, 0.02), RegimeParams(-1.0, 1.0, 0.3, 1.0, 0.02)}) {
    const auto pump = PumpSpec::gaussian(0.7);
    auto as = [](double t) { return std::exp(-t * t / 2.0) * std::cos(t); };
    const double L = p.length();
    for (double t : {2.0, 4.5, 6.0, -0.7}) {
      const double direct = gauss_legendre(
          [&](double z) {
            return pump.envelope(t - p.beta_r() * L + p.beta_rp() * z) * as(t - p.beta_r() * L + p.beta_rs() * z);
          },
          0.0, L, 40);
      const double lo = t - std::max(p.beta_r(), p.beta_s()) * L, hi = t - std::min(p.beta_r(), p.beta_s()) * L;
      const double kernel = gauss_legendre(
          [&](double tp) { return std::imag(low_ce_gf(p, pump, t, tp, Block::rs)) * as(tp); }, lo, hi, 40);
      CHECK(kernel == doctest::Approx(p.gamma().real() * direct).epsilon(1e-10));
    }
  }
}

TEST_CASE("ridge of the low-conversion kernel follows the slope law") {
  for (auto p : {RegimeParams(3.0, 0.0, 1.0, 1.0, 0.01), RegimeParams(8.0, 4.0, 6.0, 1.0, 0.01),
                 RegimeParams(4.0, 0.0, 2.5, 1.0, 0.01)}) {
    const auto pump = PumpSpec::gaussian(0.05);
    const KernelAxes axes = kernel_axes(p, pump, 1024);
    const GreenFunction gf = sample_low_ce(p, pump, axes);
    const double expect = p.beta_sp() / p.beta_rp();
    std::vector<double> ts, tps;
    const double top = gf.rs.cwiseAbs().maxCoeff();
    for (int i = 0; i < gf.rs.rows(); ++i) {
      Eigen::Index j;
      const double peak = gf.rs.row(i).cwiseAbs().maxCoeff(&j);
      if (peak < 0.9 * top) continue;  // ridge only where the pump peak is inside the band
      ts.push_back(axes.out_r.at(i));
      tps.push_back(axes.in_s.at(static_cast<int>(j)));
    }
    REQUIRE(ts.size() > 20);
    double mt = 0, mp = 0;
    for (std::size_t k = 0; k < ts.size(); ++k) mt += ts[k], mp += tps[k];
    mt /= ts.size();
    mp /= ts.size();
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < ts.size(); ++k) sxy += (ts[k] - mt) * (tps[k] - mp), sxx += (ts[k] - mt) * (ts[k] - mt);
    CHECK(sxy / sxx == doctest::Approx(expect).epsilon(0.02));
  }
}

TEST_CASE("frequency-domain kernel matches the transformed samples") {
  for (auto p : {RegimeParams::with_gamma_bar(1.0, -1.0, 1.0, 1.0, 1.0), RegimeParams::with_gamma_bar(2.0, 0.0, 0.0, 1.0, 1.0),
                 RegimeParams::with_gamma_bar(8.0, 4.0, 6.0, 1.0, 1.0)}) {
    const double tau = p.beta_r() == 8.0 ? 0.707 : 0.5;
    const auto pump = PumpSpec::gaussian(tau);
    const GreenFunction gf = sample_low_ce(p, pump, kernel_axes(p, pump, 1024));
    const SpectralKernel k = gf_fourier(gf);
    double num = 0.0, den = 0.0;
    const double wmax = 6.0 / tau;
    for (int i = 0; i < k.omega_out.size; ++i) {
      const double w = k.omega_out.at(i);
      if (std::abs(w) > wmax) continue;
      for (int j = 0; j < k.omega_in.size; ++j) {
        const double wp = k.omega_in.at(j);
        if (std::abs(wp) > wmax) continue;
        const cplx c = low_ce_gf_freq(p, pump, w, wp);
        num += std::norm(k.values(i, j) - c);
        den += std::norm(c);
      }
    }
    CHECK(std::sqrt(num / den) < 1e-3);
  }
}

TEST_CASE("frequency kernel structure") {
  const auto pump = PumpSpec::gaussian(0.5);
  // beta_rp = 0: the phase-matching factor depends on w' only, so its
  // stripes run parallel to the w axis.
  const RegimeParams p(1.0, -1.0, 1.0, 1.0, 0.02);
  auto g2 = [&](double w, double wp) {
    return low_ce_gf_freq(p, pump, w, wp) / (pump.spectrum(w - wp) * std::polar(1.0, w * p.beta_r() * p.length()));
  };
  for (double wp : {0.0, 1.3}) {
    const cplx a = g2(0.4, wp), b = g2(-2.0, wp);
    CHECK(std::abs(a - b) < 1e-12 * std::abs(a));
  }
  CHECK(std::abs(g2(0.4, 0.0) - g2(0.4, 1.3)) > 1e-3 * std::abs(g2(0.4, 0.0)));
  const RegimeParams p2 = p.with_gamma(0.04);
  CHECK(std::abs(low_ce_gf_freq(p2, pump, 0.3, 0.1) - 2.0 * low_ce_gf_freq(p, pump, 0.3, 0.1)) < 1e-15);
}

TEST_CASE("exact velocity-matched kernel reduces to first order at weak coupling") {
  for (auto p : {RegimeParams::with_gamma_bar(2.0, 0.0, 0.0, 1.0, 1e-6), RegimeParams::with_gamma_bar(-1.0, 0.5, 0.5, 1.0, 1e-6)}) {
    const auto pump = PumpSpec::gaussian(0.3, 0.2);
    for (double t : {-0.5, 0.3, 1.2, 2.0}) {
      for (double tp : {-0.6, 0.0, 0.25, 0.9}) {
        const cplx a = ssvm_gf(p, pump, t, tp, Block::rs), b = low_ce_gf(p, pump, t, tp, Block::rs);
        CHECK(std::abs(a - b) <= 1e-9 * std::abs(b) + 1e-20);
        const cplx c = ssvm_gf(p, pump, t, tp, Block::sr), d = low_ce_gf(p, pump, t, tp, Block::sr);
        CHECK(std::abs(c - d) <= 1e-9 * std::abs(d) + 1e-20);
      }
    }
  }
  CHECK_THROWS_AS(ssvm_gf(RegimeParams(2, 0, 0.5, 1, 1), PumpSpec::gaussian(1), 0, 0, Block::rs), RegimeError);
}

TEST_CASE("kernel variables") {
  const RegimeParams p = RegimeParams::with_gamma_bar(2.0, 0.5, 0.5, 1.0, 1.0);
  const auto pump = PumpSpec::gaussian(0.3);
  for (double t : {0.0, 0.7, 1.9}) {
    for (double tp : {-0.4, 0.1}) {
      const auto v = ssvm_variables(p, pump, t, tp);
      CHECK(v.xi == doctest::Approx(p.beta_r() - t + tp));
      CHECK(v.eta >= 0.0);
      CHECK(v.eta <= 1.0);
    }
  }
  double prev = 0.0;
  for (double tau = -1.0; tau < 2.0; tau += 0.05) {
    const double e = ssvm_eta(pump, tau, -0.2);
    CHECK(e >= prev);
    prev = e;
  }
}

TEST_CASE("exact kernel against the solver") {
  // Integrate the analytic rs kernel against a smooth input and compare with
  // direct propagation of the same input.
  const RegimeParams p = RegimeParams::with_gamma_bar(2.0, 0.0, 0.0, 1.0, 1.5);
  const auto pump = PumpSpec::gaussian(0.3);
  const auto grid = TemporalGrid::aligned(p, -4.0, 4.0, 0.002);
  FieldState in = FieldState::zeros(grid.n_t());
  auto as = [](double t) { return std::exp(-0.5 * t * t / 0.25) * cplx(1.0, 0.3 * t); };
  for (int i = 0; i < grid.n_t(); ++i) in.a_s[i] = as(grid.t(i));
  const FieldState out = propagate(p, pump, grid, in);
  for (double t : {0.2, 0.9, 1.6}) {
    const int i = static_cast<int>(std::lround((t - out.time_offset - grid.t_min()) / grid.dt()));
    const double ti = grid.t(i) + out.time_offset;
    const double re = gauss_legendre([&](double tp) { return std::real(ssvm_gf(p, pump, ti, tp, Block::rs) * as(tp)); },
                                     ti - 2.0, ti, 64);
    const double im = gauss_legendre([&](double tp) { return std::imag(ssvm_gf(p, pump, ti, tp, Block::rs) * as(tp)); },
                                     ti - 2.0, ti, 64);
    CHECK(std::abs(out.a_r[i] - cplx(re, im)) < 2e-5);
  }
}

TEST_CASE("sampled exact kernel is unitary and pairs modes") {
  const RegimeParams p = RegimeParams::with_gamma_bar(2.0, 0.0, 0.0, 1.0, 1.0);
  const auto pump = PumpSpec::gaussian(0.3);
  const GreenFunction gf = sample_ssvm(p, pump, kernel_axes(p, pump, 800));
  const SchmidtResult res = decompose(gf, {6});
  for (int n = 0; n < 6; ++n) CHECK(res.tau[n] * res.tau[n] + res.rho[n] * res.rho[n] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(res.pairing_overlap > 0.99);
  for (int n = 0; n < 3; ++n) CHECK(std::abs(res.tau_phase[n]) < 1e-2);
}

TEST_CASE("chirped pump leaves the exact spectrum unchanged") {
  const RegimeParams p = RegimeParams::with_gamma_bar(2.0, 0.0, 0.0, 1.0, 1.0);
  const auto pump = PumpSpec::gaussian(0.1);
  const auto chirped = pump.with_chirp(Chirp{{0.0, 0.0, 5.0}});
  const KernelAxes axes = kernel_axes(p, pump, 600);
  const SchmidtResult a = decompose(sample_ssvm(p, pump, axes, true), {3});
  const SchmidtResult b = decompose(sample_ssvm(p, chirped, axes, true), {3});
  CHECK((a.rho - b.rho).cwiseAbs().maxCoeff() < 1e-6);
  const Dechirped d = dechirp_transform(chirped);
  CHECK_FALSE(d.pump.chirped());
  CHECK(dechirp_transform(pump).theta(0.7) == 0.0);
  // phi_chirped(t') = phi(t') exp(-i theta(t')) up to one global phase.
  for (int n = 0; n < 3; ++n) {
    CVec expect(axes.in_s.size);
    for (int j = 0; j < axes.in_s.size; ++j) expect[j] = a.modes_in_s(j, n) * std::polar(1.0, -d.theta(axes.in_s.at(j)));
    const cplx g = expect.dot(b.modes_in_s.col(n));
    const cplx phase = g / std::abs(g);
    CHECK((b.modes_in_s.col(n) - phase * expect).cwiseAbs().maxCoeff() < 1e-6 * b.modes_in_s.col(n).cwiseAbs().maxCoeff() * 10);
  }
}

TEST_CASE("co-propagating closed form") {
  const auto pump = PumpSpec::gaussian(1.0);
  const TemporalGrid grid(-10.0, 10.0, 401, 1);
  FieldState in = FieldState::zeros(grid.n_t());
  for (int i = 0; i < grid.n_t(); ++i) in.a_s[i] = std::exp(-0.5 * grid.t(i) * grid.t(i) / 4.0);
  // gamma = 0 is the identity (up to the group delay bookkeeping).
  const auto id = ecop_output(RegimeParams(0.5, 0.5, 0.0, 1.0, 0.0), pump, grid, in);
  CHECK((id.a_s - in.a_s).norm() == 0.0);
  CHECK(id.a_r.norm() == 0.0);
  CHECK(id.time_offset == 0.5);
  // Choose gamma so that P = pi/2 at t = 0: full conversion there.
  const double g = 0.5 * std::numbers::pi / pump.envelope(0.0);
  const auto out = ecop_output(RegimeParams(0.0, 0.0, 0.0, 1.0, g), pump, grid, in);
  CHECK(std::abs(out.a_r[200]) == doctest::Approx(std::abs(in.a_s[200])).epsilon(1e-14));
  // Energy is exchanged pointwise.
  for (int i = 0; i < grid.n_t(); i += 37)
    CHECK(std::norm(out.a_r[i]) + std::norm(out.a_s[i]) == doctest::Approx(std::norm(in.a_s[i])));
  CHECK_THROWS_AS(ecop_output(RegimeParams(1.0, 0.0, 0.0, 1.0, g), pump, grid, in), RegimeError);
  CHECK_THROWS_AS(ecop_output(RegimeParams(0.0, 0.0, 0.0, 1.0, g), pump.with_chirp(Chirp{{0, 0, 1}}), grid, in),
                  UnsupportedError);
}

TEST_CASE("bessel integral identity") {
  for (double g : {0.5, 2.0, 10.0, -3.0}) {
    CHECK(std::abs(bessel_identity_lhs(g) - 2.0 * std::sin(g / 2.0)) < 1e-8);
    // Independent oracle: Gauss-Legendre with the standard-library Bessel.
    const double ref = g * gauss_legendre([&](double s) { return std::cyl_bessel_j(0.0, std::abs(g) * std::sqrt(s * (1 - s))); },
                                          0.0, 1.0, 50);
    CHECK(std::abs(bessel_identity_lhs(g) - ref) < 1e-10);
  }
  CHECK(bessel_identity_lhs(1e-6) == doctest::Approx(1e-6).epsilon(1e-10));
}

TEST_CASE("velocity-matched solution approaches the co-propagating limit") {
  const auto pump = PumpSpec::gaussian(1.0);
  auto input = [](double t) { return cplx(std::exp(-t * t / 8.0), 0.0); };
  std::vector<double> ts;
  for (double t = -4.0; t <= 4.0; t += 0.25) ts.push_back(t);
  const auto rows = ssvm_to_ecop_limit_check(1.2, 1.0, pump, input, {1e-1, 1e-2, 1e-3}, ts);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rel_error > rows[1].rel_error);
  CHECK(rows[1].rel_error > rows[2].rel_error);
  CHECK(rows[2].rel_error <= 1e-2);
}

TEST_CASE("dominant input mode converts with efficiency rho_1 squared") {
  const RegimeParams p = RegimeParams::with_gamma_bar(2.0, 0.0, 0.0, 1.0, 1.0);
  const auto pump = PumpSpec::gaussian(0.1);
  const SchmidtResult d = decompose(sample_ssvm(p, pump, kernel_axes(p, pump), true), {1});
  const Axis ax = d.axis_in_s;
  const auto mode = [&](double t) {
    const double x = (t - ax.start) / ax.step;
    if (x < 0.0 || x > ax.size - 1) return cplx(0.0);
    const int i = std::min(static_cast<int>(x), ax.size - 2);
    const double f = x - i;
    return (1.0 - f) * d.modes_in_s(i, 0) + f * d.modes_in_s(i + 1, 0);
  };
  const auto grid = TemporalGrid::aligned(p, -3.0, 3.0, 0.001);
  FieldState in = FieldState::zeros(grid.n_t());
  for (int i = 0; i < grid.n_t(); ++i) in.a_s[i] = mode(grid.t(i));
  const FieldState out = propagate(p, pump, grid, in);
  const double ratio = grid.dt() * out.a_r.squaredNorm() / energy(in, grid);
  CHECK(ratio == doctest::Approx(d.ce(0)).epsilon(5e-3));
  CHECK(d.ce(0) == doctest::Approx(0.852).epsilon(2e-3));
}
