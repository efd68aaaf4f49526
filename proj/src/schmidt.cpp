#include "twm/schmidt.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "twm/errors.hpp"
#include "twm/linalg.hpp"

namespace twm {

namespace {

// Pairing below this transmission falls back to the sr block.
constexpr double kTinyTau = 1e-10;

CVec normalized(const CVec& v) {
  const double n = v.norm();
  return n > 0.0 ? CVec(v / n) : v;
}

// Coordinates -> sampled functions with unit continuous norm.
CMat synthesize(const GreenFunction& gf, char channel, bool output, const CMat& coords, Axis& axis) {
  if (gf.form == GfForm::grid) {
    axis = output ? gf.out_axis(channel) : gf.in_axis(channel);
    return coords / std::sqrt(axis.step);
  }
  const BasisSpec& basis = output ? gf.out_basis(channel) : gf.in_basis(channel);
  axis = basis.sampling_axis();
  return basis.sample(axis).cast<cplx>() * coords;
}

// Phase that makes the first significant component real and positive.
cplx gauge(const CVec& v) {
  const double peak = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-3 * peak) return std::conj(v[i]) / std::abs(v[i]);
  }
  return 1.0;
}

CVec resample(const CVec& v, const Axis& axis, double step) {
  if (std::abs(axis.step - step) <= 1e-12 * step) return v;
  const int n = static_cast<int>(std::floor((axis.back() - axis.start) / step)) + 1;
  CVec out(n);
  for (int i = 0; i < n; ++i) {
    const double x = i * step / axis.step;
    const int j = std::min(static_cast<int>(x), axis.size - 2);
    const double f = x - j;
    out[i] = (1.0 - f) * v[j] + f * v[j + 1];
  }
  return out;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

double selectivity(const Vec& rho) {
  const double sum = rho.squaredNorm();
  if (sum <= 0.0) return 0.0;
  const double top = rho.cwiseAbs().maxCoeff();
  return top * top * top * top / sum;
}

double separability(const Vec& rho) {
  const double sum = rho.squaredNorm();
  if (sum <= 0.0) return 0.0;
  const double top = rho.cwiseAbs().maxCoeff();
  return top * top / sum;
}

SchmidtResult decompose(const GreenFunction& gf, const DecomposeOptions& options) {
  gf.validate();
  if (!gf.has(Block::rs)) throw ConfigError("decomposition needs the rs block");
  SchmidtResult res;
  const CMat mrs = gf.operator_matrix(Block::rs);
  if (options.n_modes == 0) {
    res.rho = singular_values(mrs);
  } else {
    const Svd f = svd(mrs);
    res.rho = f.s;
    const int k = options.n_modes < 0 ? static_cast<int>(f.s.size())
                                      : std::min<int>(options.n_modes, static_cast<int>(f.s.size()));
    CMat phi = f.v.leftCols(k), psi_out = f.u.leftCols(k);
    for (int n = 0; n < k; ++n) {
      const cplx g = gauge(phi.col(n));
      phi.col(n) *= g;
      psi_out.col(n) *= g;
    }

    // Paired modes: G_ss phi_n = tau_n Phi_n, G_rr^H Psi_n = tau_n psi_n,
    // G_sr psi_n = -rho_n Phi_n.
    CMat big_phi, psi_in;
    Vec tau_ss, tau_rr;
    const bool has_sr = gf.has(Block::sr);
    const CMat msr = has_sr ? gf.operator_matrix(Block::sr) : CMat();
    if (gf.has(Block::ss)) {
      const CMat y = gf.operator_matrix(Block::ss) * phi;
      big_phi.resize(y.rows(), k);
      tau_ss.resize(k);
      for (int n = 0; n < k; ++n) {
        tau_ss[n] = y.col(n).norm();
        big_phi.col(n) = normalized(y.col(n));
      }
    }
    if (gf.has(Block::rr)) {
      const CMat z = gf.operator_matrix(Block::rr).adjoint() * psi_out;
      psi_in.resize(z.rows(), k);
      tau_rr.resize(k);
      for (int n = 0; n < k; ++n) {
        tau_rr[n] = z.col(n).norm();
        psi_in.col(n) = normalized(z.col(n));
      }
    }
    if (has_sr) {
      for (int n = 0; n < k; ++n) {
        const bool phi_ok = big_phi.size() > 0 && tau_ss[n] > kTinyTau;
        const bool psi_ok = psi_in.size() > 0 && tau_rr[n] > kTinyTau;
        if (!phi_ok && psi_ok) {
          if (big_phi.size() == 0) big_phi = CMat::Zero(msr.rows(), k);
          big_phi.col(n) = normalized(-msr * psi_in.col(n));
        } else if (phi_ok && !psi_ok) {
          if (psi_in.size() == 0) psi_in = CMat::Zero(msr.cols(), k);
          psi_in.col(n) = normalized(-msr.adjoint() * big_phi.col(n));
        }
      }
    }

    if (tau_ss.size() > 0 || tau_rr.size() > 0) {
      res.tau = tau_ss.size() > 0 ? tau_ss : tau_rr;
      res.tau_phase = Vec::Zero(k);
      res.pairing_method = "shared-vector";
    }
    if (has_sr && big_phi.size() > 0 && psi_in.size() > 0) {
      const Svd fsr = svd(msr);
      for (int n = 0; n < k; ++n) {
        const cplx c = big_phi.col(n).dot(-msr * psi_in.col(n));
        if (res.tau_phase.size() > 0 && std::abs(c) > kTinyTau) res.tau_phase[n] = std::arg(c);
        const double o1 = std::abs(fsr.u.col(n).dot(big_phi.col(n)));
        const double o2 = std::abs(fsr.v.col(n).dot(psi_in.col(n)));
        res.pairing_overlap = std::min({res.pairing_overlap, o1, o2});
      }
    }

    res.modes_in_s = synthesize(gf, 's', false, phi, res.axis_in_s);
    res.modes_out_r = synthesize(gf, 'r', true, psi_out, res.axis_out_r);
    if (big_phi.size() > 0) res.modes_out_s = synthesize(gf, 's', true, big_phi, res.axis_out_s);
    if (psi_in.size() > 0) res.modes_in_r = synthesize(gf, 'r', false, psi_in, res.axis_in_r);
  }
  res.ce = res.rho.cwiseAbs2();
  res.selectivity = selectivity(res.rho);
  res.separability = separability(res.rho);
  return res;
}

ModeCoefficients beamsplitter_apply(const SchmidtResult& result, const CVec& a, const CVec& b) {
  if (a.size() != b.size()) throw ConfigError("coefficient vectors differ in length");
  if (a.size() > result.rho.size()) throw ConfigError("more coefficients than Schmidt modes");
  ModeCoefficients out{CVec(a.size()), CVec(a.size())};
  for (Eigen::Index n = 0; n < a.size(); ++n) {
    const double rho = result.rho[n];
    const double tau = n < result.tau.size() ? result.tau[n] : std::sqrt(std::max(0.0, 1.0 - rho * rho));
    out.c[n] = tau * a[n] + rho * b[n];
    out.d[n] = tau * b[n] - rho * a[n];
  }
  return out;
}

double shape_fidelity(const SchmidtResult& result, int k) {
  if (k < 0 || k >= result.stored_modes()) throw ConfigError("mode index out of range");
  const double h = std::min(result.axis_in_s.step, result.axis_out_r.step);
  const CVec a = resample(result.modes_in_s.col(k), result.axis_in_s, h);
  const CVec b = resample(result.modes_out_r.col(k), result.axis_out_r, h);
  const double na = a.squaredNorm() * h, nb = b.squaredNorm() * h;
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  const Eigen::Index n = a.size(), m = b.size();
  double best = 0.0;
  // b index j pairs with a index j - s.
  for (Eigen::Index s = -(m - 1); s < n; ++s) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, s), hi = std::min<Eigen::Index>(n, m + s);
    if (hi <= lo) continue;
    const cplx c = b.segment(lo - s, hi - lo).dot(a.segment(lo, hi - lo));
    best = std::max(best, std::norm(c) * h * h / (na * nb));
  }
  return std::min(best, 1.0);
}

CMat SpectralKernel::operator_matrix() const {
  return values * (std::sqrt(omega_out.step * omega_in.step) / (2.0 * std::numbers::pi));
}

SpectralKernel gf_fourier(const GreenFunction& gf, Block block) {
  if (gf.form != GfForm::grid) throw UnsupportedError("Fourier transform needs a grid-form Green function");
  if (!gf.has(block)) throw ConfigError("block " + to_string(block) + " is absent");
  const Axis& out = gf.out_axis(output_channel(block));
  const Axis& in = gf.in_axis(input_channel(block));
  const int no = out.size, ni = in.size;
  CMat work = gf.block(block);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    auto* data = reinterpret_cast<fftw_complex*>(work.data());
    int n_o[] = {no}, n_i[] = {ni};
    fftw_plan p_out = fftw_plan_many_dft(1, n_o, ni, data, nullptr, 1, no, data, nullptr, 1, no, FFTW_BACKWARD,
                                         FFTW_ESTIMATE);
    fftw_plan p_in = fftw_plan_many_dft(1, n_i, no, data, nullptr, no, 1, data, nullptr, no, 1, FFTW_FORWARD,
                                        FFTW_ESTIMATE);
    fftw_execute(p_out);
    fftw_execute(p_in);
    fftw_destroy_plan(p_out);
    fftw_destroy_plan(p_in);
  }
  SpectralKernel k;
  const double two_pi = 2.0 * std::numbers::pi;
  k.omega_out = {-two_pi * (no / 2) / (no * out.step), two_pi / (no * out.step), no};
  k.omega_in = {-two_pi * (ni / 2) / (ni * in.step), two_pi / (ni * in.step), ni};
  k.values.resize(no, ni);
  const double w = out.step * in.step;
  for (int q = 0; q < ni; ++q) {
    const int kq = q - ni / 2;
    const int src_q = (kq + ni) % ni;
    const cplx ph_in = std::polar(1.0, -k.omega_in.at(q) * in.start);
    for (int p = 0; p < no; ++p) {
      const int kp = p - no / 2;
      const int src_p = (kp + no) % no;
      k.values(p, q) = work(src_p, src_q) * std::polar(w, k.omega_out.at(p) * out.start) * ph_in;
    }
  }
  return k;
}

}  // namespace twm
