#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <numbers>

#include "twm/errors.hpp"
#include "twm/model.hpp"

using namespace twm;

namespace {

// Composite Simpson rule, written out so the oracle shares no code with
// the library quadrature.
template <class F>
double simpson(F f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("gaussian pump peak and decay") {
  const auto p = PumpSpec::gaussian(1.0);
  CHECK(std::abs(eval_pump(p, 0.0) - std::pow(std::numbers::pi, -0.25)) < 1e-15);
  CHECK(std::abs(eval_pump(p, 0.0).real() - 0.7511) < 1e-4);
  CHECK(std::abs(eval_pump(p, 40.0)) < 1e-300);
  CHECK(std::abs(eval_pump(p, -40.0)) < 1e-300);
}

TEST_CASE("hermite-gauss-1 pump is odd with a zero crossing at its center") {
  const auto p = PumpSpec::hermite_gauss_1(0.7, 0.3);
  CHECK(std::abs(eval_pump(p, 0.3)) == 0.0);
  CHECK(p.envelope(0.3 + 0.5) == doctest::Approx(-p.envelope(0.3 - 0.5)).epsilon(1e-14));
}

TEST_CASE("pump shapes are square normalized") {
  const std::vector<PumpSpec> pumps = {
      PumpSpec::gaussian(0.1), PumpSpec::gaussian(1.7, -2.0), PumpSpec::hermite_gauss_1(0.707),
      PumpSpec::gaussian(1.0).with_chirp(Chirp{{0.0, 0.3, 5.0}}),
      PumpSpec::tabulated({-1.0, -0.2, 0.0, 0.5, 1.5}, {0.0, 2.0, 3.0, 1.0, 0.0})};
  for (const auto& p : pumps) {
    const auto [lo, hi] = p.support();
    auto sq = [&](double t) { return std::norm(eval_pump(p, t)); };
    double norm = 0.0;
    if (p.shape() == PumpShape::tabulated) {
      // Node to node, where the integrand is a quadratic.
      const auto& ts = p.table_times();
      for (std::size_t i = 0; i + 1 < ts.size(); ++i) norm += simpson(sq, ts[i], ts[i + 1], 2);
    } else {
      norm = simpson(sq, lo - 1.0, hi + 1.0, 200000);
    }
    CAPTURE(to_string(p.shape()));
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(p.intensity_cdf(hi + 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("intensity cdf and envelope integral agree with direct quadrature") {
  for (const auto& p : {PumpSpec::gaussian(0.6, 0.2), PumpSpec::hermite_gauss_1(0.6, 0.2),
                        PumpSpec::tabulated({0.0, 1.0, 2.0}, {0.0, 1.0, 0.5})}) {
    for (double t : {-0.5, 0.1, 0.7, 1.3}) {
      const double cdf = simpson([&](double x) { return p.envelope(x) * p.envelope(x); }, -8.0, t, 100000);
      CHECK(p.intensity_cdf(t) == doctest::Approx(cdf).epsilon(1e-9));
      const double integ = simpson([&](double x) { return p.envelope(x); }, -0.3, t, 100000);
      CHECK(p.envelope_integral(-0.3, t) == doctest::Approx(integ).epsilon(1e-9));
    }
  }
}

TEST_CASE("pump spectrum closed forms match direct Fourier quadrature") {
  for (const auto& p : {PumpSpec::gaussian(0.8, 0.4), PumpSpec::hermite_gauss_1(0.8, 0.4)}) {
    for (double w : {0.0, 0.7, -2.1, 4.0}) {
      const double re = simpson([&](double t) { return p.envelope(t) * std::cos(w * t); }, -10, 10);
      const double im = simpson([&](double t) { return p.envelope(t) * std::sin(w * t); }, -10, 10);
      CHECK(std::abs(p.spectrum(w) - cplx(re, im)) < 1e-10);
    }
  }
  const auto chirped = PumpSpec::gaussian(0.8).with_chirp(Chirp{{0.0, 0.0, 1.5}});
  const double w = 1.3;
  const double re = simpson([&](double t) { return std::real(chirped(t) * std::polar(1.0, w * t)); }, -10, 10);
  const double im = simpson([&](double t) { return std::imag(chirped(t) * std::polar(1.0, w * t)); }, -10, 10);
  CHECK(std::abs(chirped.spectrum(w) - cplx(re, im)) < 1e-9);
}

TEST_CASE("chirp changes phase only") {
  const auto p = PumpSpec::gaussian(1.0);
  const auto c = p.with_chirp(Chirp{{0.0, 0.0, 5.0}});
  CHECK(c.chirped());
  for (double t : {-1.0, 0.2, 2.0}) {
    CHECK(std::abs(c(t)) == doctest::Approx(std::abs(p(t))).epsilon(1e-15));
    CHECK(std::arg(c(t) * std::conj(p(t))) == doctest::Approx(std::remainder(5.0 * t * t, 2 * std::numbers::pi)));
  }
  CHECK_FALSE(c.without_chirp().chirped());
}

TEST_CASE("pump construction rejects bad input") {
  CHECK_THROWS_AS(PumpSpec::gaussian(0.0), ConfigError);
  CHECK_THROWS_AS(PumpSpec::gaussian(-1.0), ConfigError);
  CHECK_THROWS_AS(PumpSpec::tabulated({0.0, 0.0}, {1.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(PumpSpec::tabulated({0.0, 1.0}, {0.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(pump_shape_from_string("square"), ConfigError);
}

TEST_CASE("regime params derived quantities") {
  const RegimeParams p(8.0, 4.0, 6.0, 1.0, 0.04);
  CHECK(p.beta_rs() == 4.0);
  CHECK(p.beta_rp() == 2.0);
  CHECK(p.beta_sp() == -2.0);
  CHECK(p.gamma_bar().real() == doctest::Approx(0.01));
  CHECK_THROWS_AS(RegimeParams(1.0, 1.0, 0.0, 1.0, 1.0).gamma_bar(), RegimeError);
  CHECK_THROWS_AS(RegimeParams::with_gamma_bar(1.0, 1.0, 0.0, 1.0, 1.0), RegimeError);
  CHECK_THROWS_AS(RegimeParams(1.0, 0.0, 0.0, -1.0, 1.0), ConfigError);
}

TEST_CASE("regime classification") {
  CHECK(classify_regime(RegimeParams(2, 0, 0, 1, 1)) == Regime::SSVM);
  CHECK(classify_regime(RegimeParams(4, 0, 2, 1, 1)) == Regime::SCuP);
  CHECK(classify_regime(RegimeParams(1, 1, 0, 1, 1)) == Regime::ECoP);
  CHECK(classify_regime(RegimeParams(1, -1, 1, 1, 1)) == Regime::SSVM);
  CHECK(classify_regime(RegimeParams(8, 4, 6, 1, 1)) == Regime::SCuP);
  CHECK(classify_regime(RegimeParams(8, 4, 5, 1, 1)) == Regime::CuP);
  CHECK(classify_regime(RegimeParams(8, 4, 2, 1, 1)) == Regime::CoP);
  CHECK(classify_regime(RegimeParams(4, 0, 2.5, 1, 1)) == Regime::CuP);
  // ECoP wins over SSVM when all three coincide.
  CHECK(classify_regime(RegimeParams(1, 1, 1, 1, 1)) == Regime::ECoP);
  for (double c : {-3.0, 0.5, 10.0}) {
    for (const auto& p : {RegimeParams(2, 0, 0, 1, 1), RegimeParams(4, 0, 2, 1, 1), RegimeParams(8, 4, 6, 1, 1),
                          RegimeParams(8, 4, 2, 1, 1), RegimeParams(1, 1, 0, 1, 1)})
      CHECK(classify_regime(p.shifted(c)) == classify_regime(p));
  }
}

TEST_CASE("grid construction and coverage") {
  CHECK_THROWS_AS(TemporalGrid(0.0, 1.0, 1, 1), ConfigError);
  CHECK_THROWS_AS(TemporalGrid(0.0, 1.0, 4, 0), ConfigError);
  CHECK_THROWS_AS(TemporalGrid(1.0, 0.0, 4, 1), ConfigError);
  const TemporalGrid g(-1.0, 1.0, 5, 3);
  CHECK(g.dt() == 0.5);
  CHECK(g.t(4) == 1.0);

  const RegimeParams params(2, 0, 0, 1, 1);
  const auto pump = PumpSpec::gaussian(0.1);
  const auto def = TemporalGrid::default_for(params, pump);
  CHECK(def.n_t() >= 1024);
  CHECK(std::abs(params.beta_rs() * params.length() / def.dt() - def.n_z()) < 1e-9);
  CHECK_NOTHROW(def.check_coverage(params, pump));
  CHECK_THROWS_AS(TemporalGrid(-0.2, 0.2, 100, 10).check_coverage(params, pump), ConfigError);
}

TEST_CASE("hermite-gauss basis") {
  const TemporalGrid grid(-10.0, 10.0, 2048, 1);
  const Vec b0 = hermite_gauss_basis(0, 1.0, grid);
  for (int i = 0; i < grid.n_t(); i += 97)
    CHECK(b0[i] == doctest::Approx(std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * grid.t(i) * grid.t(i))));
  const Vec b1 = hermite_gauss_basis(1, 1.0, grid);
  CHECK(std::abs(b0.dot(b1) * grid.dt()) < 1e-10);
  const Vec b5 = hermite_gauss_basis(5, 1.0, grid);
  CHECK(b5.squaredNorm() * grid.dt() == doctest::Approx(1.0).epsilon(1e-8));

  // Gram matrix oracle via the explicit Hermite polynomials H0..H3.
  const Vec t = grid.axis().samples();
  const Mat f = hermite_gauss_functions(4, 1.3, 0.4, t);
  for (int i = 0; i < t.size(); i += 211) {
    const double x = (t[i] - 0.4) / 1.3;
    const double g = std::exp(-0.5 * x * x) / std::sqrt(1.3 * std::sqrt(std::numbers::pi));
    CHECK(f(i, 2) == doctest::Approx(g * (4 * x * x - 2) / std::sqrt(8.0)).epsilon(1e-12));
    CHECK(f(i, 3) == doctest::Approx(g * (8 * x * x * x - 12 * x) / std::sqrt(48.0)).epsilon(1e-12));
  }
  const Mat gram = f.transpose() * f * grid.dt();
  CHECK((gram - Mat::Identity(4, 4)).norm() < 1e-8);

  CHECK_THROWS_AS(hermite_gauss_basis(-1, 1.0, grid), ConfigError);
  CHECK_THROWS_AS(hermite_gauss_basis(0, 0.0, grid), ConfigError);
  CHECK_THROWS_AS(hermite_gauss_basis(200, 0.1, grid), ResolutionError);
}

TEST_CASE("basis span reconstructs lower orders") {
  const TemporalGrid grid(-12.0, 12.0, 2048, 1);
  const Mat f = hermite_gauss_functions(21, 1.0, 0.0, grid.axis().samples());
  for (int n : {0, 7, 20}) {
    const Vec b = f.col(n);
    const Vec coeff = f.transpose() * b * grid.dt();
    CHECK((f * coeff - b).norm() * std::sqrt(grid.dt()) < 1e-8);
  }
}

TEST_CASE("tabulated pump center and width") {
  const auto p = PumpSpec::tabulated({-2.0, 0.0, 2.0}, {0.0, 1.0, 0.0});
  CHECK(std::abs(p.center()) < 1e-14);
  // Triangle t -> 1 - |t|/2 squared, normalized: variance 2/5.
  CHECK(p.tau_p() == doctest::Approx(std::sqrt(0.4)).epsilon(1e-12));
  CHECK(p.envelope(3.0) == 0.0);
}
