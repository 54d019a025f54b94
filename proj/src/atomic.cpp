#include "qmem/atomic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qmem/angular.hpp"
#include "qmem/errors.hpp"

namespace qmem {

void LevelScheme::validate() const {
  if (F_a < 0 || F_b < 0 || F_c < 0) throw ValidationError("level scheme: F values must be >= 0");
  if (std::abs(F_b - F_c) > 1) throw ValidationError("level scheme: |F_b - F_c| > 1 forbids the signal dipole");
  if (std::abs(F_a - F_c) > 1) throw ValidationError("level scheme: |F_a - F_c| > 1 forbids the control dipole");
  if (F_b == 0 && F_c == 0) throw ValidationError("level scheme: 0 -> 0 dipole transition");
  if (!(Gamma_c > 0.0) || !std::isfinite(Gamma_c)) throw ValidationError("level scheme: Gamma_c must be > 0");
  if (!(omega_c > 0.0) || !std::isfinite(omega_c)) throw ValidationError("level scheme: omega_c must be > 0");
  if (!(f_cb > 0.0 && f_cb <= 1.0)) throw ValidationError("level scheme: f_cb must lie in (0, 1]");
  for (double g : {g_a, g_b, g_c}) {
    if (!std::isfinite(g)) throw ValidationError("level scheme: non-finite g-factor");
  }
}

LevelScheme LevelScheme::rb85_d1() {
  LevelScheme s;
  s.F_a = 3;
  s.F_b = 2;
  s.F_c = 3;
  const double I = 2.5;
  const double gj_s = lande_g_j(0.0, 0.5, 0.5);
  const double gj_p = lande_g_j(1.0, 0.5, 0.5);
  s.g_a = lande_g_f(0.5, I, 3.0, gj_s);
  s.g_b = lande_g_f(0.5, I, 2.0, gj_s);
  s.g_c = lande_g_f(0.5, I, 3.0, gj_p);
  s.Gamma_c = 2.0 * std::numbers::pi * 5.75e6;
  s.omega_c = 2.0 * std::numbers::pi * kSpeedOfLight / 794.979e-9;
  s.f_cb = 5.0 / 9.0;
  s.label_a = "5S1/2 F=3";
  s.label_b = "5S1/2 F=2";
  s.label_c = "5P1/2 F'=3";
  return s;
}

void Polarization::validate() const {
  if ((beta != 1 && beta != -1) || (r != 1 && r != -1)) {
    throw ValidationError("polarization: beta and r must each be +1 or -1");
  }
}

ZeemanConfig zeeman_frequencies(const LevelScheme& scheme, Polarization pol, double B_z,
                                double mu_B_over_hbar) {
  pol.validate();
  if (!std::isfinite(B_z)) throw ValidationError("zeeman: B_z must be finite");
  ZeemanConfig z;
  z.B_z = B_z;
  z.mu_B_over_hbar = mu_B_over_hbar;
  const double larmor = mu_B_over_hbar * B_z;
  z.delta_c = pol.beta * scheme.g_c * larmor;
  z.Delta_cb = (scheme.g_c - scheme.g_b) * larmor;
  z.delta_a = (pol.beta - pol.r) * scheme.g_a * larmor;
  z.Delta_ab = (scheme.g_a - scheme.g_b) * larmor;
  return z;
}

double field_for_ground_splitting(const LevelScheme& scheme, double Delta_ab, double mu_B_over_hbar) {
  const double dg = scheme.g_a - scheme.g_b;
  if (dg == 0.0) throw ValidationError("zeeman: g_a == g_b, ground splitting is field independent");
  return Delta_ab / (dg * mu_B_over_hbar);
}

double lande_g_j(double L, double S, double J) {
  if (J <= 0.0) return 0.0;
  return 1.0 + (J * (J + 1) + S * (S + 1) - L * (L + 1)) / (2.0 * J * (J + 1));
}

double lande_g_f(double J, double I, double F, double g_J) {
  if (F <= 0.0) return 0.0;
  return g_J * (F * (F + 1) + J * (J + 1) - I * (I + 1)) / (2.0 * F * (F + 1));
}

double signal_coupling(const LevelScheme& scheme, int beta, int m) {
  return clebsch_gordan(Spin(scheme.F_b), Spin(m), Spin(1), Spin(beta), Spin(scheme.F_c), Spin(m + beta));
}

double control_coupling(const LevelScheme& scheme, Polarization pol, int m) {
  return clebsch_gordan(Spin(scheme.F_a), Spin(m + pol.beta - pol.r), Spin(1), Spin(pol.r),
                        Spin(scheme.F_c), Spin(m + pol.beta));
}

SublevelTable dipole_weights(const LevelScheme& scheme, int beta) {
  SublevelTable x(scheme.F_b);
  double norm = 0.0;
  for (int m = -scheme.F_b; m <= scheme.F_b; ++m) {
    x[m] = signal_coupling(scheme, beta, m);
    norm += x[m] * x[m];
  }
  if (norm == 0.0) throw ValidationError("dipole weights: no sublevel couples to the signal");
  const double inv = 1.0 / std::sqrt(norm);
  for (int m = -scheme.F_b; m <= scheme.F_b; ++m) x[m] *= inv;
  return x;
}

double MediumProfile::depth_derivative_at(double zq) const {
  if (z.empty() || zq < z.front() || zq > z.back()) return 0.0;
  const auto it = std::upper_bound(z.begin(), z.end(), zq);
  if (it == z.end()) return depth_derivative.back();
  const auto i = static_cast<std::size_t>(it - z.begin());
  if (i == 0) return depth_derivative.front();
  const double w = (zq - z[i - 1]) / (z[i] - z[i - 1]);
  return (1.0 - w) * depth_derivative[i - 1] + w * depth_derivative[i];
}

double depth_per_density(const LevelScheme& scheme, int beta) {
  double cg_sum = 0.0;
  for (int m = -scheme.F_b; m <= scheme.F_b; ++m) {
    const double c = signal_coupling(scheme, beta, m);
    cg_sum += c * c;
  }
  const double lambda_bar = kSpeedOfLight / scheme.omega_c;
  return 6.0 * std::numbers::pi * scheme.f_cb * lambda_bar * lambda_bar * cg_sum / (2 * scheme.F_b + 1);
}

MediumProfile optical_depth(const LevelScheme& scheme, int beta, std::span<const double> z,
                            std::span<const double> density) {
  if (z.size() != density.size() || z.size() < 2) {
    throw ValidationError("optical depth: need matching z and density tables with >= 2 points");
  }
  if (z.front() != 0.0) throw ValidationError("optical depth: z grid must start at 0");
  for (std::size_t i = 1; i < z.size(); ++i) {
    if (!(z[i] > z[i - 1])) throw ValidationError("optical depth: z grid must be strictly increasing");
  }
  for (double n : density) {
    if (!(n >= 0.0) || !std::isfinite(n)) throw ValidationError("optical depth: density must be finite and >= 0");
  }
  const double k = depth_per_density(scheme, beta);
  MediumProfile p;
  p.z.assign(z.begin(), z.end());
  p.density.assign(density.begin(), density.end());
  p.depth.assign(z.size(), 0.0);
  p.depth_derivative.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) p.depth_derivative[i] = k * density[i];
  for (std::size_t i = 1; i < z.size(); ++i) {
    p.depth[i] = p.depth[i - 1] +
                 0.5 * (z[i] - z[i - 1]) * (p.depth_derivative[i] + p.depth_derivative[i - 1]);
  }
  return p;
}

MediumProfile medium_with_depth(const LevelScheme& scheme, int beta, DensityShape shape, double length,
                                std::size_t points, double total_depth, double gaussian_sigma) {
  if (!(length > 0.0)) throw ValidationError("medium: length must be > 0");
  if (points < 2) throw ValidationError("medium: need >= 2 z points");
  if (!(total_depth >= 0.0)) throw ValidationError("medium: optical depth must be >= 0");
  if (shape == DensityShape::Gaussian && !(gaussian_sigma > 0.0)) {
    throw ValidationError("medium: gaussian profile needs sigma > 0");
  }
  std::vector<double> z(points), n(points);
  for (std::size_t i = 0; i < points; ++i) {
    z[i] = length * static_cast<double>(i) / static_cast<double>(points - 1);
    if (shape == DensityShape::Uniform) {
      n[i] = 1.0;
    } else {
      const double u = (z[i] - 0.5 * length) / gaussian_sigma;
      n[i] = std::exp(-0.5 * u * u);
    }
  }
  const MediumProfile unit = optical_depth(scheme, beta, z, n);
  const double scale = total_depth / unit.total_depth();
  for (double& v : n) v *= scale;
  return optical_depth(scheme, beta, z, n);
}

}  // namespace qmem
