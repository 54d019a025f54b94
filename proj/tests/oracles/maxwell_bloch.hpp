#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "qmem/atomic.hpp"

// Linear (weak-signal) Maxwell-Bloch equations for the Zeeman-degenerate
// Lambda system, integrated directly in the time domain in the retarded
// frame: per ground sublevel m an optical coherence p_m and a spin coherence
// q_m,
//   dp/dt = (i e_m - Gamma) p + i c_m Omega(t) q + i Phi
//   dq/dt = (i d_m - gamma0) q + i c_m Omega(t) p
//   dPhi/dz = (i/2) d'(z) sum_m X_m^2 Gamma p_m,
// with e_m = delta_c + m Delta_cb and d_m = delta_a + m Delta_ab. Time steps
// are Crank-Nicolson (second order), z steps RK4. Causal, with zero initial
// coherences: no periodic wrap-around and no detuning grid.
namespace oracle {

struct MbSetup {
  qmem::LevelScheme scheme = qmem::LevelScheme::rb85_d1();
  qmem::Polarization pol;
  qmem::ZeemanConfig zeeman;
  double total_depth = 8.0;   ///< uniform medium
  double gamma0 = 0.0;
  double t_start = 0.0;
  double dt = 0.5e-9;
  std::size_t n_time = 0;
  int z_steps = 64;
  std::function<double(double)> omega;               ///< control Rabi frequency
  std::function<std::complex<double>(double)> input;  ///< signal envelope at z = 0
};

struct MbResult {
  std::vector<double> t;
  std::vector<std::complex<double>> output;
};

inline MbResult maxwell_bloch(const MbSetup& s) {
  using cplx = std::complex<double>;
  const cplx I(0.0, 1.0);
  const double G = s.scheme.Gamma_cb();
  const double dzeta = 1.0 / s.z_steps;  // z in units of the medium length
  const double dprime = s.total_depth;   // d'(zeta) for zeta in [0, 1]
  const qmem::SublevelTable X = qmem::dipole_weights(s.scheme, s.pol.beta);

  struct Level {
    double x2, c, e, d;
  };
  std::vector<Level> levels;
  for (int m = X.min_m(); m <= X.max_m(); ++m) {
    if (X[m] == 0.0) continue;
    levels.push_back({X[m] * X[m], qmem::control_coupling(s.scheme, s.pol, m),
                      s.zeeman.delta_c + m * s.zeeman.Delta_cb, s.zeeman.delta_a + m * s.zeeman.Delta_ab});
  }

  MbResult r;
  r.t.resize(s.n_time);
  std::vector<double> om(s.n_time);
  std::vector<cplx> phi(s.n_time);
  for (std::size_t i = 0; i < s.n_time; ++i) {
    r.t[i] = s.t_start + s.dt * static_cast<double>(i);
    om[i] = s.omega(r.t[i]);
    phi[i] = s.input(r.t[i]);
  }

  // dPhi/dzeta for a given field trace.
  auto rhs = [&](const std::vector<cplx>& f) {
    std::vector<cplx> out(s.n_time, 0.0);
    const double h = s.dt;
    for (const Level& lv : levels) {
      cplx p = 0.0, q = 0.0;
      for (std::size_t i = 0; i + 1 < s.n_time; ++i) {
        // A_n y_n + b_n and the implicit 2x2 solve at n + 1.
        const cplx a11 = I * lv.e - G, a22 = I * lv.d - s.gamma0;
        const cplx a12n = I * lv.c * om[i], a12m = I * lv.c * om[i + 1];
        const cplx rp = p + 0.5 * h * (a11 * p + a12n * q) + 0.5 * h * I * (f[i] + f[i + 1]);
        const cplx rq = q + 0.5 * h * (a12n * p + a22 * q);
        const cplx m11 = 1.0 - 0.5 * h * a11, m12 = -0.5 * h * a12m, m22 = 1.0 - 0.5 * h * a22;
        const cplx det = m11 * m22 - m12 * m12;
        p = (m22 * rp - m12 * rq) / det;
        q = (m11 * rq - m12 * rp) / det;
        out[i + 1] += 0.5 * I * dprime * lv.x2 * G * p;
      }
    }
    return out;
  };

  for (int step = 0; step < s.z_steps; ++step) {
    auto axpy = [&](const std::vector<cplx>& k, double w) {
      std::vector<cplx> v(phi);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += w * k[i];
      return v;
    };
    const auto k1 = rhs(phi);
    const auto k2 = rhs(axpy(k1, 0.5 * dzeta));
    const auto k3 = rhs(axpy(k2, 0.5 * dzeta));
    const auto k4 = rhs(axpy(k3, dzeta));
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] += dzeta / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  r.output = phi;
  return r;
}

}  // namespace oracle
